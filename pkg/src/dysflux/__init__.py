"""dysflux: simulate, detect, and score token-annotated dysfluent speech."""

from .annotation import (
    AnnotatedSequence,
    AnnotationLevel,
    DysfluencyEvent,
    DysfluencyType,
    TimeBound,
    events_of,
    parse_annotated,
    render_annotated,
)
from .align import (
    Alignment,
    DetectorConfig,
    TimedUnit,
    WordSpan,
    detect,
    detect_oracle,
    lcs,
    presegment,
    token_to_time,
)
from .manifest import ManifestRecord, PredictionRecord, read_manifest, write_manifest
from .metrics import (
    EvalReport,
    UtteranceEval,
    bound_loss,
    build_report,
    cacc,
    eacc,
    ter,
    token_distance,
)
from .phonemes import PronunciationDict, cmu_to_ipa, g2p, strip_stress
from .simulate import SimulationConfig, SimulatedRecord, inject, simulate_corpus
from .tokenizer import Vocabulary, build_phoneme_vocab, build_word_vocab, decode, encode

__version__ = "0.1.0"
