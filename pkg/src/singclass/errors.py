"""Exception types shared across the package."""


class SingclassError(Exception):
    """Base class for all package errors."""


class PolyParseError(SingclassError):
    """Malformed curve expression.

    Attributes:
        position: 0-based index into the source text where parsing failed.
        expected: short description of what would have been legal there.
    """

    def __init__(self, position, expected, text=None):
        self.position = position
        self.expected = expected
        self.text = text
        msg = f"syntax error at position {position}: expected {expected}"
        if text is not None:
            msg += f"\n  {text}\n  {' ' * position}^"
        super().__init__(msg)


class DegreeOverflow(SingclassError):
    def __init__(self, exponent, cap):
        self.exponent = exponent
        self.cap = cap
        super().__init__(f"exponent {exponent} exceeds cap {cap}")


class ZeroPolynomial(SingclassError):
    pass


class NeedsPreparation(SingclassError):
    """The germ has no pure-y term; shear into generic position first."""


class NonReduced(SingclassError):
    """The germ carries a repeated one-dimensional component (e.g. y^2 | f)."""


class NumericFailure(SingclassError):
    pass


class NonConvergence(NumericFailure):
    def __init__(self, iterations, residual=None):
        self.iterations = iterations
        self.residual = residual
        msg = f"root iteration did not converge after {iterations} iterations"
        if residual is not None:
            msg += f" (residual {residual})"
        super().__init__(msg)


class EdgeMismatch(SingclassError):
    pass


class DepthExceeded(SingclassError):
    def __init__(self, depth, partial=None):
        self.depth = depth
        self.partial = partial
        super().__init__(f"expansion depth cap {depth} reached")


class InsufficientTruncation(SingclassError):
    def __init__(self, required_order):
        self.required_order = required_order
        super().__init__(
            f"branches agree up to truncation; re-expand past order {required_order}"
        )


class UltrametricViolation(SingclassError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"ultrametric inequality violated at triple {witness}")


class ProbeUnderflow(NumericFailure):
    pass


class ConstraintUnsatisfiable(SingclassError):
    pass


class SchemaError(SingclassError):
    def __init__(self, path, field, detail=""):
        self.path = path
        self.field = field
        super().__init__(f"{path}: bad manifest field {field!r} {detail}".rstrip())


class Exhausted(SingclassError):
    """Search budget spent without a realization; absence is not a proof."""

    def __init__(self, reason="budget exhausted"):
        self.reason = reason
        super().__init__(reason)
