"""Exception types shared across the package."""


class KsolError(Exception):
    pass


class CapReached(KsolError):
    """Precision escalation hit the configured bit cap."""


class PrecisionExhausted(KsolError):
    pass


class DegenerateInput(KsolError):
    """A polytope or simplex is not full-dimensional."""


class InvalidData(KsolError):
    pass


class InadmissibleY(KsolError):
    pass


class NoSignChange(KsolError):
    pass


class BoundaryFailure(KsolError):
    def __init__(self, segment, value=None):
        self.segment = segment
        self.value = value
        super().__init__(f"gradient sign not certified on boundary segment {segment}")


class TooLarge(KsolError):
    pass


class AmbiguousMatch(KsolError):
    def __init__(self, ids):
        self.ids = list(ids)
        super().__init__("several catalog entries match: " + ", ".join(self.ids))


class ParseError(KsolError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class ValidationError(KsolError):
    def __init__(self, condition, witness=None, message=""):
        self.condition = condition
        self.witness = witness
        super().__init__(f"condition ({condition}) fails: {message} witness={witness}")
