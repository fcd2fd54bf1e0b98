"""Exception hierarchy.

Every domain failure derives from :class:`LoewnerError`; the CLI maps these to
exit code 1. Malformed arguments raise plain :class:`ValueError`.
"""


class LoewnerError(Exception):
    """Base class for domain errors."""


class SingularPencilAt(LoewnerError):
    """``s E - A`` is singular to working precision.

    ``s`` is ``inf`` when the mass matrix ``E`` itself is singular.
    """

    def __init__(self, s, index=None):
        self.s = complex(s)
        self.index = index
        msg = f"pencil sE - A is singular at s = {self.s}"
        if index is not None:
            msg += f" (grid tuple {index})"
        super().__init__(msg)

    def at_index(self, index):
        return SingularPencilAt(self.s, index=index)


class ResonanceError(LoewnerError):
    """``k * lambda_i == mu_j`` (1-based indices)."""

    def __init__(self, i, j, k):
        self.i, self.j, self.k = i, j, k
        super().__init__(f"resonance {k}·λ_{i} = μ_{j}")


class OutOfRadius(LoewnerError):
    def __init__(self, i, value, radius):
        self.i = i
        self.value = value
        self.radius = radius
        super().__init__(
            f"|ζ_{i}| = {value:.6g} exceeds the estimated convergence radius {radius:.6g}"
        )


class DegenerateData(LoewnerError):
    """All singular values of the Loewner pencil fall below the threshold."""


class SingularMass(LoewnerError):
    def __init__(self, x, t=None):
        self.x = x
        self.t = t
        msg = "mass matrix of the moment-matching model is singular"
        if t is not None:
            msg += f" at t = {t:.6g}"
        super().__init__(msg)


class NonFinite(LoewnerError):
    def __init__(self, t):
        self.t = t
        super().__init__(f"state became non-finite at t = {t:.6g}")


class GridMismatch(LoewnerError):
    pass
