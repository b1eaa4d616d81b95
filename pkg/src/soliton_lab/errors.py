"""Exception hierarchy for soliton_lab."""


class SolitonLabError(Exception):
    """Base class for all library errors."""


class InvalidParams(SolitonLabError, ValueError):
    pass


class InvalidInit(SolitonLabError, ValueError):
    pass


class ZeroSlope(SolitonLabError, ValueError):
    """A zero of h with vanishing slope is not a cone point."""


class OnSingularLocus(SolitonLabError, ValueError):
    """The first integral's logarithm is singular on the invariant isocline."""


class OutOfRange(SolitonLabError, ValueError):
    pass


class OutOfDomain(SolitonLabError, ValueError):
    pass


class StepSizeUnderflow(SolitonLabError, ArithmeticError):
    def __init__(self, r, step):
        super().__init__(f"step size underflow at r={r!r} (step={step!r})")
        self.r = r
        self.step = step


class DomainError(SolitonLabError, ValueError):
    pass


class NoTwoPositiveRoots(SolitonLabError, ValueError):
    pass


class RootNotBracketed(SolitonLabError, ValueError):
    pass


class EqualAngles(SolitonLabError, ValueError):
    def __init__(self, alpha):
        super().__init__(
            f"equal cone angles ({alpha!r} rad) admit no a>0 soliton; "
            "use closed_forms.spherical_football for the constant-curvature family"
        )
        self.alpha = alpha


class InvalidPinchSlope(SolitonLabError, ValueError):
    pass


class DriftExceeded(SolitonLabError, ArithmeticError):
    def __init__(self, drift, limit):
        super().__init__(f"first-integral drift {drift:.3e} exceeds {limit:.1e}")
        self.drift = drift
        self.limit = limit


class RegimeNotReached(SolitonLabError, ValueError):
    pass


class EmbeddingLost(SolitonLabError, ValueError):
    """|h'| > 1: the parallels are too long for a surface of revolution in R^3."""

    def __init__(self, r, u):
        super().__init__(f"rotational embedding lost at r={r:.6g} (|u| - 1 = {abs(u) - 1:.3g})")
        self.r = r
        self.u = u
