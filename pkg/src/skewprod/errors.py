"""Exception hierarchy. Every failure the engine can detect is one of these."""


class SkewprodError(Exception):
    """Base class; carries a short machine-readable ``kind``."""

    kind = "error"

    def to_dict(self):
        return {"kind": self.kind, "message": str(self)}


class InputError(SkewprodError):
    kind = "input-error"


class LexError(InputError):
    kind = "lex-error"

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset

    def to_dict(self):
        return {"kind": self.kind, "message": str(self), "offset": self.offset}


class ParseError(InputError):
    kind = "parse-error"

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset

    def to_dict(self):
        return {"kind": self.kind, "message": str(self), "offset": self.offset}


class SchemaError(InputError):
    kind = "schema-error"

    def __init__(self, message, pointer):
        super().__init__(f"{pointer}: {message}")
        self.pointer = pointer

    def to_dict(self):
        return {"kind": self.kind, "message": str(self), "pointer": self.pointer}


class ComponentError(InputError):
    """An expression error attributed to one immersion component."""

    def __init__(self, index, cause):
        super().__init__(f"component {index}: {cause}")
        self.index = index
        self.cause = cause
        self.kind = cause.kind

    def to_dict(self):
        d = self.cause.to_dict()
        d["component"] = self.index
        d["message"] = str(self)
        return d


class DomainError(SkewprodError):
    kind = "domain-error"

    def __init__(self, function, value):
        super().__init__(f"{function} evaluated outside its domain at {value!r}")
        self.function = function
        self.value = value


class RankDeficientError(SkewprodError):
    kind = "rank-deficient"


class FrameDegenerateError(SkewprodError):
    kind = "frame-degenerate"


class AsymmetryError(SkewprodError):
    kind = "asymmetry-error"


class NonConstantLambdaError(SkewprodError):
    kind = "non-constant-lambda"

    def __init__(self, message, spread):
        super().__init__(message)
        self.spread = spread


class DimensionJumpError(SkewprodError):
    kind = "dimension-jump"


class MultiplicityDriftError(SkewprodError):
    kind = "multiplicity-drift"


class PartitionMismatchError(SkewprodError):
    kind = "partition-mismatch"


class NotProperError(SkewprodError):
    kind = "not-proper"


class NotWarpedError(SkewprodError):
    kind = "not-warped"
