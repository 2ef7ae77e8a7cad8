"""Exception hierarchy shared by every module of the package."""


class SdtwError(Exception):
    """Base class for all package errors."""


class ZeroVariance(SdtwError, ValueError):
    """A sequence to be z-scored is flat (population std == 0)."""


class InvalidParams(SdtwError, ValueError):
    pass


# pore model / reference
class InvalidBase(SdtwError, ValueError):
    pass


class SequenceTooShort(SdtwError, ValueError):
    pass


class BadIndexFile(SdtwError, ValueError):
    pass


# event pipeline
class SignalTooShort(SdtwError, ValueError):
    pass


class NotEnoughEvents(SdtwError, ValueError):
    """Fewer events than ``prefix_trim + query_events`` were detected."""


# alignment engines
class EmptyInput(SdtwError, ValueError):
    pass


class QueryLongerThanReference(SdtwError, ValueError):
    pass


class QueryTooLong(SdtwError, ValueError):
    pass


class EmptyReference(SdtwError, ValueError):
    pass


class SimulationFinished(SdtwError, RuntimeError):
    pass


# mapping
class ParamsMismatch(SdtwError, ValueError):
    pass


class NegativeScore(SdtwError, ValueError):
    pass


# file formats
class FormatError(SdtwError, ValueError):
    """Malformed input file; ``lineno`` is 1-based when known."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class BadHeader(FormatError):
    pass


class LengthMismatch(FormatError):
    pass


class NonNumericSignal(FormatError):
    pass


class EmptySequence(FormatError):
    pass


class NoRecords(FormatError):
    pass


class MalformedLine(FormatError):
    pass


class MissingKmer(FormatError):
    pass


class InconsistentK(FormatError):
    pass
