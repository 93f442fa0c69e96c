"""CMU phoneme inventory, stress stripping, dictionary lookup, and IPA mapping."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import OutOfVocabulary, UnknownPhoneme

# The 39 stress-free CMU phoneme symbols, in alphabetical order.
INVENTORY = (
    "AA", "AE", "AH", "AO", "AW", "AY", "B", "CH", "D", "DH",
    "EH", "ER", "EY", "F", "G", "HH", "IH", "IY", "JH", "K",
    "L", "M", "N", "NG", "OW", "OY", "P", "R", "S", "SH",
    "T", "TH", "UH", "UW", "V", "W", "Y", "Z", "ZH",
)
_INVENTORY_SET = frozenset(INVENTORY)

# Spoken-silence unit used in realized sequences (pauses), never a phoneme.
SILENCE_UNIT = "sil"

# Segment-wise CMU -> IPA table. Tense vowels carry the length mark so that
# prolongation can stack further marks on top; the mapping is injective.
CMU_TO_IPA = {
    "AA": "ɑː", "AE": "æ", "AH": "ʌ", "AO": "ɔː", "AW": "aʊ",
    "AY": "aɪ", "B": "b", "CH": "tʃ", "D": "d", "DH": "ð",
    "EH": "ɛ", "ER": "ɜː", "EY": "eɪ", "F": "f", "G": "ɡ",
    "HH": "h", "IH": "ɪ", "IY": "iː", "JH": "dʒ", "K": "k",
    "L": "l", "M": "m", "N": "n", "NG": "ŋ", "OW": "oʊ",
    "OY": "ɔɪ", "P": "p", "R": "ɹ", "S": "s", "SH": "ʃ",
    "T": "t", "TH": "θ", "UH": "ʊ", "UW": "uː", "V": "v",
    "W": "w", "Y": "j", "Z": "z", "ZH": "ʒ",
}

LENGTH_MARK = "ː"
IPA_SILENCE = "‖"

# Manner classes used to draw substitution confusables: a phoneme may be
# replaced by another member of its class.
_MANNER_CLASSES = (
    ("AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER", "EY", "IH",
     "IY", "OW", "OY", "UH", "UW"),            # vowels and diphthongs
    ("B", "D", "G", "K", "P", "T"),             # stops
    ("CH", "JH"),                               # affricates
    ("DH", "F", "HH", "S", "SH", "TH", "V", "Z", "ZH"),  # fricatives
    ("M", "N", "NG"),                           # nasals
    ("L", "R"),                                 # liquids
    ("W", "Y"),                                 # glides
)

CONFUSABLE = {
    p: tuple(q for q in group if q != p)
    for group in _MANNER_CLASSES
    for p in group
}

_BUNDLED_DICT = Path(__file__).parent / "data" / "cmudict.small"
DICT_ENV_VAR = "DYSFLUX_DICT"


def strip_stress(raw: str) -> str:
    """Drop a trailing stress digit (0-2) and validate against the inventory."""
    symbol = raw[:-1] if raw and raw[-1] in "012" else raw
    if symbol not in _INVENTORY_SET:
        raise UnknownPhoneme(raw)
    return symbol


@dataclass
class PronunciationDict:
    """Lowercase word -> primary stress-free pronunciation."""

    entries: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, word: str) -> tuple[str, ...]:
        pron = self.entries.get(word.lower())
        if pron is None:
            raise OutOfVocabulary(word)
        return pron

    @classmethod
    def load(cls, path: str | Path) -> "PronunciationDict":
        """Read a CMU-format dictionary: ``WORD  PH1 PH2 ...`` per line.

        Comment lines starting with ";;;" are skipped. Variant entries like
        ``WORD(1)`` are ignored; the first (unnumbered) pronunciation wins.
        """
        entries: dict[str, tuple[str, ...]] = {}
        with open(path, encoding="utf-8", errors="replace") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith(";;;"):
                    continue
                head, *phones = line.split()
                if not phones:
                    continue
                if head.endswith(")") and "(" in head:
                    continue  # numbered variant
                word = head.lower()
                if word in entries:
                    continue
                entries[word] = tuple(strip_stress(p) for p in phones)
        return cls(entries)


def default_dict_path() -> Path:
    """Dictionary search order: $DYSFLUX_DICT, then the bundled excerpt."""
    env = os.environ.get(DICT_ENV_VAR)
    return Path(env) if env else _BUNDLED_DICT


def load_default_dict() -> PronunciationDict:
    return PronunciationDict.load(default_dict_path())


def g2p(word: str, dictionary: PronunciationDict) -> tuple[str, ...]:
    """Primary stress-free pronunciation of ``word``; OutOfVocabulary if absent."""
    if not word:
        raise OutOfVocabulary("<empty>")
    return dictionary.lookup(word)


def cmu_to_ipa(seq: list[str] | tuple[str, ...]) -> tuple[str, ...]:
    """Map CMU phonemes (or the silence unit) to IPA segments, one to one."""
    out = []
    for p in seq:
        if p == SILENCE_UNIT:
            out.append(IPA_SILENCE)
            continue
        ipa = CMU_TO_IPA.get(p)
        if ipa is None:
            raise UnknownPhoneme(p)
        out.append(ipa)
    return tuple(out)


def valid_ipa_segment(segment: str) -> bool:
    """True for table segments, optionally lengthened, and the silence mark."""
    if segment == IPA_SILENCE:
        return True
    base = segment.rstrip(LENGTH_MARK)
    return any(v.rstrip(LENGTH_MARK) == base for v in CMU_TO_IPA.values())
