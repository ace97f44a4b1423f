"""Exception hierarchy shared by every module of the toolkit."""


class UmbilicError(Exception):
    """Base class for all toolkit errors."""


class DomainError(UmbilicError, ValueError):
    """A point lies outside the domain of a warp, a chart or an expression."""


class SingularChartError(DomainError):
    """The conformal factor is numerically singular (chart boundary)."""


class AdmissibilityError(UmbilicError, ValueError):
    """A profile state violates |t_s| <= 1 for its first integral."""


class DegenerateTangentError(UmbilicError, ValueError):
    """The sampled tangent basis is (numerically) rank deficient."""


class ExprSyntaxError(UmbilicError, ValueError):
    """Malformed warp expression; ``offset`` is the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(ExprSyntaxError):
    """An identifier that is neither ``t``, a constant nor a known function."""


class ExprDomainError(DomainError):
    """Evaluation left the domain of an operation; carries the subexpression."""

    def __init__(self, message, node):
        super().__init__(f"{message}: {node}")
        self.node = node
