"""Exception hierarchy shared across the toolkit."""


class StancegenError(Exception):
    """Base class for all toolkit errors."""


class CorpusError(StancegenError):
    """Structural problem in a discussion or corpus."""


class NoThesis(CorpusError):
    pass


class MultipleTheses(CorpusError):
    pass


class DanglingParent(CorpusError):
    pass


class CycleDetected(CorpusError):
    pass


class DuplicateClaimId(CorpusError):
    pass


class UnknownClaim(CorpusError):
    pass


class UnknownAuthor(CorpusError):
    pass


class UnknownDocument(CorpusError):
    pass


class IsThesis(CorpusError):
    """The operation is undefined for the root claim."""


class EmptyCorpus(StancegenError):
    pass


class ParseError(StancegenError):
    """Raised while reading a claim-record stream; carries a line number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class MalformedRecord(ParseError):
    pass


class MissingField(ParseError):
    def __init__(self, field, line_number=None):
        super().__init__(f"missing field {field!r}", line_number)
        self.field = field


class FractionOutOfRange(StancegenError):
    pass


class NotAChild(StancegenError):
    pass


class ThesisHasNoStance(StancegenError):
    pass


class InvalidP(StancegenError):
    pass


class UntrainedModel(StancegenError):
    pass


class ConfigConflict(StancegenError):
    pass
