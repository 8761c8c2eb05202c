"""Exception types shared across the toolkit."""


class VoiceCmdError(Exception):
    """Base class for all toolkit errors."""


# --- audio / front-end ---

class WavFormatError(VoiceCmdError):
    """Input WAV is not PCM mono 16 kHz 16-bit; message names the bad field."""


class InvalidAudio(VoiceCmdError):
    pass


class NoSpeechDetected(VoiceCmdError):
    pass


class InputTooShort(VoiceCmdError):
    pass


# --- vector quantization ---

class EmptyInput(VoiceCmdError):
    pass


class DimensionMismatch(VoiceCmdError):
    pass


class MissingCodebook(VoiceCmdError):
    pass


# --- HMM / alignment ---

class TooShort(VoiceCmdError):
    """Observation cannot traverse the model chain (3 frames per phone)."""


class Unalignable(VoiceCmdError):
    pass


class IllegalPath(VoiceCmdError):
    pass


# --- training ---

class SegmentTooShort(VoiceCmdError):
    pass


class TrainingFailed(VoiceCmdError):
    pass


class MissingPhonemeCoverage(UserWarning):
    """Warning: a lexicon phoneme has no bootstrap segment; flat-initialized."""


# --- lexicon / grammar ---

class LexiconError(VoiceCmdError):
    pass


class UnknownPhoneme(LexiconError):
    pass


class DuplicateWord(LexiconError):
    pass


class EmptyPronunciation(LexiconError):
    pass


class GrammarError(VoiceCmdError):
    pass


class UnknownWord(GrammarError):
    pass


class EmptyGrammar(GrammarError):
    pass


# --- decoder ---

class MissingModel(VoiceCmdError):
    pass


class NoPathSurvived(VoiceCmdError):
    pass


class EmptyTestset(VoiceCmdError):
    pass


# --- service ---

class ProtocolViolation(VoiceCmdError):
    pass


class BindFailure(VoiceCmdError):
    pass


# --- synthetic corpus ---

class MissingSpec(VoiceCmdError):
    pass
