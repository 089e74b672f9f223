"""Exception types raised by the scattering constructions."""


class GraphError(ValueError):
    """Input graph or wiring violates a structural invariant."""


class NumericalError(ArithmeticError):
    """Base class for failures tied to a particular spectral parameter."""

    def __init__(self, lam, detail):
        self.lam = lam
        self.detail = detail
        super().__init__(f"lambda={_show(lam)}: {detail}")


def _show(x):
    if isinstance(x, complex) or getattr(x, "imag", 0):
        return repr(complex(x))
    try:
        return repr(float(x))
    except (TypeError, ValueError):
        return repr(x)


class PoleProximity(NumericalError):
    """lambda sits on (or within tolerance of) a pole of the resolvent."""

    def __init__(self, lam, pole):
        self.pole = pole
        super().__init__(lam, f"within tolerance of resolvent pole {_show(pole)}")


class ResonancePole(NumericalError):
    """The lead scattering matrix has a pole at lambda."""


class SigmaSingular(NumericalError):
    """I - Sigma(lambda) is numerically singular."""


class DtnSingular(NumericalError):
    """I + R(lambda) is singular so the Dirichlet-to-Neumann map is undefined."""


class NotStationary(NumericalError):
    """Amplitude vector is not a fixed point of the evolution operator."""


class UnresolvedCrossing(NumericalError):
    """An eigenphase sign change could not be bracketed for bisection."""
