"""Word- and phoneme-level tokenizers over annotated text.

Vocabulary layout: base symbols, then the four specials, then the four
level-legal dysfluency markers as the top ids. Extending an existing
vocabulary with markers at the end mirrors how a pretrained ASR vocabulary
would be grown, and the marker-ids-are-top-4 property is asserted in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .annotation import (
    AnnotatedSequence,
    AnnotationLevel,
    DysfluencyType,
    MARKER_TEXT,
    MARKER_TYPE,
    parse_annotated,
)
from .errors import (
    DuplicateWord,
    IdOutOfRange,
    LevelMismatch,
    ReservedSymbolInBase,
    UnknownPhoneme,
)
from .phonemes import INVENTORY

PAD, BOS, EOS, UNK = "<pad>", "<bos>", "<eos>", "<unk>"
SPECIALS = (PAD, BOS, EOS, UNK)

WORD_MARKERS = ("[REP]", "[DEL]", "[INS]", "[PAU]")
PHONEME_MARKERS = ("[REP]", "[DEL]", "[SUB]", "[PRO]")

# Documented size of the pretrained word-level ASR vocabulary this layout
# would extend; kept only for parity checks, not used by the tokenizer.
PRETRAINED_WORD_VOCAB_SIZE = 50_258


@dataclass(frozen=True)
class Vocabulary:
    level: AnnotationLevel
    symbols: tuple[str, ...]
    index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "index", {s: i for i, s in enumerate(self.symbols)}
        )

    def __len__(self) -> int:
        return len(self.symbols)

    def id(self, symbol: str) -> int:
        return self.index[symbol]

    @property
    def marker_ids(self) -> tuple[int, ...]:
        return tuple(range(len(self.symbols) - 4, len(self.symbols)))

    def save(self, path) -> None:
        Path(path).write_text(
            "\n".join(self.symbols) + "\n", encoding="utf-8"
        )

    @classmethod
    def load(cls, path, level: AnnotationLevel) -> "Vocabulary":
        symbols = Path(path).read_text(encoding="utf-8").splitlines()
        return cls(level, tuple(symbols))


def build_phoneme_vocab() -> Vocabulary:
    """39 phonemes (alphabetical), 4 specials, then [REP] [DEL] [SUB] [PRO]."""
    return Vocabulary(
        AnnotationLevel.PHONEME, INVENTORY + SPECIALS + PHONEME_MARKERS
    )


def build_word_vocab(base_words) -> Vocabulary:
    """Base words in the given order, 4 specials, then [REP] [DEL] [INS] [PAU]."""
    base = list(base_words)
    seen = set()
    for w in base:
        if w in seen:
            raise DuplicateWord(w)
        seen.add(w)
        if w in MARKER_TYPE or w in SPECIALS:
            raise ReservedSymbolInBase(w)
    return Vocabulary(AnnotationLevel.WORD, tuple(base) + SPECIALS + WORD_MARKERS)


def encode(seq: AnnotatedSequence, vocab: Vocabulary) -> list[int]:
    """BOS + unit/marker ids in surface order + EOS.

    Unknown word-level units map to UNK; unknown phonemes are an error.
    """
    if vocab.level is not seq.level:
        raise LevelMismatch(f"{seq.level.value} sequence, {vocab.level.value} vocab")
    unk = vocab.id(UNK)
    by_slot: dict[int, list[DysfluencyType]] = {}
    for kind, slot in seq.markers:
        by_slot.setdefault(slot, []).append(kind)
    ids = [vocab.id(BOS)]
    for i in range(len(seq.units) + 1):
        for kind in by_slot.get(i, ()):
            ids.append(vocab.id(MARKER_TEXT[kind]))
        if i < len(seq.units):
            unit_id = vocab.index.get(seq.units[i])
            if unit_id is None:
                if vocab.level is AnnotationLevel.PHONEME:
                    raise UnknownPhoneme(seq.units[i])
                unit_id = unk
            ids.append(unit_id)
    ids.append(vocab.id(EOS))
    return ids


def decode(ids, vocab: Vocabulary) -> AnnotatedSequence:
    """Strip specials and rebuild the annotated sequence; inverse of encode
    for UNK-free inputs."""
    special_ids = {vocab.id(s) for s in SPECIALS}
    units: list[str] = []
    markers: list[tuple[DysfluencyType, int]] = []
    for token_id in ids:
        if not 0 <= token_id < len(vocab):
            raise IdOutOfRange(str(token_id))
        if token_id in special_ids:
            continue
        symbol = vocab.symbols[token_id]
        kind = MARKER_TYPE.get(symbol)
        if kind is not None:
            markers.append((kind, len(units)))
        else:
            units.append(symbol)
    return AnnotatedSequence(vocab.level, tuple(units), tuple(markers))


def encode_text(text: str, vocab: Vocabulary) -> list[int]:
    return encode(parse_annotated(text, vocab.level), vocab)
