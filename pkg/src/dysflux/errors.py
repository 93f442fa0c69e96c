"""Exception hierarchy. Everything raised on bad data derives from DysfluxError."""


class DysfluxError(Exception):
    """Base class for all toolkit errors."""


# --- annotation grammar ---

class AnnotationError(DysfluxError):
    pass


class EmptyInput(AnnotationError):
    pass


class UnknownMarker(AnnotationError):
    pass


class IllegalMarkerForLevel(AnnotationError):
    pass


class MarkerAtStart(AnnotationError):
    """Unit-anchored marker ([REP]/[SUB]/[PRO]) before the first unit."""


# --- phoneme inventory / dictionary ---

class UnknownPhoneme(DysfluxError):
    pass


class OutOfVocabulary(DysfluxError):
    pass


# --- simulation ---

class IllegalKindForLevel(DysfluxError):
    pass


class ReferenceTooShort(DysfluxError):
    pass


class AllTranscriptsOOV(DysfluxError):
    pass


# --- tokenizer ---

class DuplicateWord(DysfluxError):
    pass


class ReservedSymbolInBase(DysfluxError):
    pass


class LevelMismatch(DysfluxError):
    pass


class IdOutOfRange(DysfluxError):
    pass


# --- alignment / timing ---

class EmptyObserved(DysfluxError):
    pass


class AnchorOutOfRange(DysfluxError):
    pass


# --- metrics ---

class EmptyReference(DysfluxError):
    pass


class EmptyEvalSet(DysfluxError):
    pass


class NoDysfluentInstances(DysfluxError):
    pass


class NoMatchedPairs(DysfluxError):
    pass


class LengthMismatch(DysfluxError):
    pass


class EmptyGroup(DysfluxError):
    pass


# --- audio ---

class TooShort(DysfluxError):
    pass


class WrongSampleRate(DysfluxError):
    pass


# --- manifests / harness ---

class MalformedManifest(DysfluxError):
    pass


class IdMismatch(DysfluxError):
    pass
