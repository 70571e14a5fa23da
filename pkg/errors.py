"""Exception types raised by the ncgraph modules.

Every error derives from ``NCGraphError`` (itself a ``ValueError``), so callers
can catch input problems with a single clause.
"""


class NCGraphError(ValueError):
    """Base class for all library errors"""


class ShapeMismatchError(NCGraphError):
    pass


class AllZeroInputError(NCGraphError):
    pass


class NonSquareAmbientError(NCGraphError):
    pass


class NotHermitianError(NCGraphError):
    pass


class NotProjectionError(NCGraphError):
    pass


class ZeroProjectionError(NCGraphError):
    pass


class NotUnitaryError(NCGraphError):
    pass


class NotIsometryError(NCGraphError):
    pass


class NotOperatorSystemError(NCGraphError):
    pass


class AmbientMismatchError(NCGraphError):
    pass


class VertexCountMismatchError(NCGraphError):
    pass


class TooLargeError(NCGraphError):
    """Input exceeds the practical limit of an exact solver"""


class EmptySetError(NCGraphError):
    pass


class InvalidChannelError(NCGraphError):
    pass


class TooManyKrausError(NCGraphError):
    pass


class ZeroVectorError(NCGraphError):
    pass


class BlockSizeMismatchError(NCGraphError):
    pass


class BlockTooSmallError(NCGraphError):
    """A rank reduction step needs a block with at least two columns"""


class UnsupportedCertificateError(NCGraphError):
    """No verifier exists for the certificate's parameter and witness kind"""


class NotInFError(NCGraphError):
    """Gram matrix violates a membership condition of F_t^+(G)"""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        super().__init__(f"not in F_t^+(G): {condition}" + (f" ({detail})" if detail else ""))


class NotInHError(NCGraphError):
    """Gram matrix is not in H_t^+(G): some diagonal block differs from the identity"""


class DegenerateABoundsError(NCGraphError):
    pass


class NotInPerpError(NCGraphError):
    pass


class NotPSDError(NCGraphError):
    pass


class MaxIterationsError(NCGraphError):
    pass


class NumericalBreakdownError(NCGraphError):
    pass


class ParseError(NCGraphError):
    pass


class UnknownCaseError(NCGraphError):
    pass
