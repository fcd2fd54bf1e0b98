"""Bilinear descriptor systems and generator data, with validation and pencil solves.

A SISO bilinear system is stored as the quintuple ``(E, A, N, B, C)`` with

    E x' = A x + N x u + B u,    y = C x.

All arrays are complex128 and read-only once constructed.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla
from scipy.linalg.lapack import zgecon

from .errors import ResonanceError, SingularPencilAt

RESONANCE_RTOL = 1e-10
KAPPA_MAX = 32
_EPS = np.finfo(float).eps


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BilinearSystem:
    """Descriptor bilinear realization ``(E, A, N, B, C)``.

    ``B`` and ``C`` are stored as 1-D arrays; an ``n x 1`` column or a
    ``1 x n`` row is flattened on construction. Shapes are not checked here so
    that malformed input can still reach :func:`validate_system`.
    """

    E: np.ndarray
    A: np.ndarray
    N: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        for name in ("E", "A", "N", "B", "C"):
            arr = np.array(getattr(self, name), dtype=complex)
            if name in ("B", "C") and arr.ndim == 2 and 1 in arr.shape:
                arr = arr.ravel()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_dense(cls, A, N, B, C, E=None) -> "BilinearSystem":
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        if E is None:
            E = np.eye(A.shape[0])
        return cls(np.atleast_2d(E), A, np.atleast_2d(N), np.atleast_1d(B), np.atleast_1d(C))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def vector_field(self, x, u):
        """Right-hand side ``E^{-1}(A x + N x u + B u)``."""
        rhs = self.A @ x + u * (self.N @ x + self.B)
        return np.linalg.solve(self.E, rhs)


@dataclass(frozen=True, eq=False)
class GeneratorPair:
    """Diagonal input generator ``(Λ, R)`` and observer generator ``(M, L)``.

    ``lam``/``R`` drive the system (``u = R ζ``); ``mu``/``L`` filter the
    output. Both generators have the same dimension ``rho``.
    """

    lam: np.ndarray
    R: np.ndarray
    mu: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        for name in ("lam", "R", "mu", "L"):
            object.__setattr__(self, name, _frozen(np.atleast_1d(getattr(self, name))))
        sizes = {len(self.lam), len(self.R), len(self.mu), len(self.L)}
        if len(sizes) != 1 or 0 in sizes:
            raise ValueError(
                "generator arrays must be nonempty and of equal length, got "
                f"{len(self.lam)}, {len(self.R)}, {len(self.mu)}, {len(self.L)}"
            )

    @classmethod
    def unit(cls, lam, mu) -> "GeneratorPair":
        """Generator with all tangential weights ``R = L = 1``."""
        lam = np.atleast_1d(lam)
        return cls(lam, np.ones(len(lam)), np.atleast_1d(mu), np.ones(len(lam)))

    @property
    def rho(self) -> int:
        return len(self.lam)


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    spectral_abscissa: float = float("nan")

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self):
        return {
            "errors": list(self.errors),
            "warnings": list(self.warnings),
            "spectral_abscissa": self.spectral_abscissa,
        }


def is_resonant(a, b) -> bool:
    return abs(a - b) < RESONANCE_RTOL * max(1.0, abs(b))


def find_resonances(gen: GeneratorPair, kmax: int):
    """All 1-based ``(i, j, k)`` with ``k * lam_i == mu_j`` and ``k <= kmax``."""
    hits = []
    for i, lam in enumerate(gen.lam, 1):
        for j, mu in enumerate(gen.mu, 1):
            for k in range(1, kmax + 1):
                if is_resonant(k * lam, mu):
                    hits.append((i, j, k))
    return hits


def check_resonance(gen: GeneratorPair, kmax: int) -> None:
    hits = find_resonances(gen, kmax)
    if hits:
        hits.sort(key=lambda h: (h[2], h[0], h[1]))
        raise ResonanceError(*hits[0])


def _duplicates(values):
    vals = list(values)
    out = []
    for a in range(len(vals)):
        for b in range(a + 1, len(vals)):
            if is_resonant(vals[a], vals[b]):
                out.append((a + 1, b + 1))
    return out


def check_distinct(gen: GeneratorPair) -> None:
    for name, vals in (("lambda", gen.lam), ("mu", gen.mu)):
        dup = _duplicates(vals)
        if dup:
            a, b = dup[0]
            raise ValueError(f"{name} entries {a} and {b} coincide")


def _shape_errors(sys: BilinearSystem):
    errs = []
    for name in ("E", "A", "N"):
        m = getattr(sys, name)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            errs.append(f"dimension mismatch: {name} must be square, got shape {m.shape}")
    if errs:
        return errs
    n = sys.A.shape[0]
    if n < 1:
        errs.append("dimension mismatch: state dimension must be >= 1")
    for name in ("E", "N"):
        if getattr(sys, name).shape != (n, n):
            errs.append(f"dimension mismatch: {name} has shape {getattr(sys, name).shape}, A is {n}x{n}")
    for name in ("B", "C"):
        v = getattr(sys, name)
        if v.ndim != 1 or v.shape[0] != n:
            errs.append(f"dimension mismatch: {name} has shape {v.shape}, expected length {n}")
    return errs


def pencil_is_singular(E, A, npoints: int = 3, seed: int = 0) -> bool:
    """Probe ``det(sE - A)`` at random points; singular iff all vanish.

    Vanishing is judged scale-free through ``sigma_min / sigma_max`` so that
    large or tiny matrices are treated alike.
    """
    rng = np.random.default_rng(seed)
    scale = max(1.0, np.linalg.norm(A, 2) / max(np.linalg.norm(E, 2), _EPS))
    for _ in range(npoints):
        s = scale * complex(rng.standard_normal(), rng.standard_normal())
        sv = np.linalg.svd(s * E - A, compute_uv=False)
        if sv[0] > 0 and sv[-1] > 1e3 * _EPS * sv[0] * len(sv):
            return False
    return True


def pencil_eigenvalues(sys: BilinearSystem) -> np.ndarray:
    """Finite generalized eigenvalues of ``(A, E)``."""
    ev = spla.eigvals(sys.A, sys.E)
    return ev[np.isfinite(ev)]


def validate_system(sys: BilinearSystem, gen: GeneratorPair | None = None,
                    kappa_max: int = KAPPA_MAX, strict_imaginary: bool = False) -> ValidationReport:
    """Check a system (and optionally a generator) against the standing assumptions.

    Never raises: every problem lands in ``errors`` (unusable input) or
    ``warnings`` (usable, but some downstream solve may fail or the stability
    assumption is violated).
    """
    rep = ValidationReport()
    rep.errors.extend(_shape_errors(sys))
    if rep.errors:
        return rep
    for name in ("E", "A", "N", "B", "C"):
        if not np.all(np.isfinite(getattr(sys, name))):
            rep.errors.append(f"{name} contains non-finite entries")
    if rep.errors:
        return rep
    if pencil_is_singular(sys.E, sys.A):
        rep.errors.append("singular pencil: det(sE - A) vanishes identically")
        return rep

    ev = pencil_eigenvalues(sys)
    if ev.size:
        rep.spectral_abscissa = float(np.max(ev.real))
        if rep.spectral_abscissa >= 0:
            rep.warnings.append(
                f"spectral abscissa {rep.spectral_abscissa:.6g} >= 0: "
                "unforced system is not exponentially stable"
            )
    if gen is None:
        return rep

    for name, vals in (("λ", gen.lam), ("μ", gen.mu)):
        for a, b in _duplicates(vals):
            rep.errors.append(f"{name}_{a} and {name}_{b} coincide")
        if strict_imaginary:
            for idx, v in enumerate(vals, 1):
                if v.real != 0:
                    rep.errors.append(f"{name}_{idx} = {v} is not on the imaginary axis")

    def _hits(point):
        return [e for e in ev if is_resonant(point, e)]

    for i, lam in enumerate(gen.lam, 1):
        for k in range(1, kappa_max + 1):
            if _hits(k * lam):
                pre = "" if k == 1 else f"{k}·"
                rep.warnings.append(f"generator point {pre}λ_{i} = {k * lam} is a pencil eigenvalue")
    for j, mu in enumerate(gen.mu, 1):
        if _hits(mu):
            rep.warnings.append(f"generator point μ_{j} = {mu} is a pencil eigenvalue")
    for i, j, k in find_resonances(gen, kappa_max):
        rep.warnings.append(f"resonance {k}·λ_{i} = μ_{j}")
    return rep


class PencilSolver:
    """LU factorization of ``s E - A`` with right and left solves.

    Raises :class:`SingularPencilAt` when the 1-norm reciprocal condition
    estimate drops below machine epsilon.
    """

    def __init__(self, sys: BilinearSystem, s):
        self.s = complex(s)
        M = self.s * sys.E - sys.A
        anorm = np.linalg.norm(M, 1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", spla.LinAlgWarning)
            self._lu = spla.lu_factor(M, check_finite=False)
        rcond, _ = zgecon(self._lu[0], anorm, norm="1")
        if not anorm > 0 or not rcond >= _EPS:
            raise SingularPencilAt(self.s)

    def solve(self, b):
        """``(sE - A)^{-1} b``."""
        return spla.lu_solve(self._lu, b, check_finite=False)

    def solve_left(self, c):
        """``c (sE - A)^{-1}`` for a row vector ``c``."""
        return spla.lu_solve(self._lu, c, trans=1, check_finite=False)


def resolvent(sys: BilinearSystem, s) -> np.ndarray:
    """Return ``Φ(s) = (sE - A)^{-1}`` via an LU factor-and-solve."""
    return PencilSolver(sys, s).solve(np.eye(sys.n, dtype=complex))
