import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dysflux.annotation import AnnotationLevel, TimeBound
from dysflux.align import TimedUnit
from dysflux.kernels import warmup
from dysflux.phonemes import load_default_dict


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    warmup()


@pytest.fixture(scope="session")
def dictionary():
    return load_default_dict()


@pytest.fixture(scope="session")
def dict_words(dictionary):
    return sorted(dictionary.entries)


def make_reference(rng: np.random.Generator, words, level, dictionary, lo=4, hi=10):
    """Random reference units built from dictionary words."""
    picked = [words[int(i)] for i in rng.integers(0, len(words), rng.integers(lo, hi))]
    if level is AnnotationLevel.WORD:
        return picked
    return [p for w in picked for p in dictionary.lookup(w)]


def timed_units(units, durations):
    t = 0.0
    out = []
    for u, d in zip(units, durations):
        out.append(TimedUnit(u, TimeBound(t, t + d)))
        t += d
    return out


def record_timed_units(record):
    return timed_units(record.realized.units, record.realized.durations)
