"""Multi-tuples, generalized reachability/observability, Loewner pencil, BLF ROM.

Right multi-tuples are stored as their deepest tuple written outermost-first,
``(λ_m, ..., λ_2, λ_1)``; the implied members are its suffixes. Left
multi-tuples are stored as ``(μ_1, ..., μ_p)``; the implied members are its
prefixes. A right tuple of depth ``m`` contributes ``m`` columns to the
reachability matrix, a left tuple of depth ``p`` contributes ``p`` rows to the
observability matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (BilinearSystem, GeneratorPair, PencilSolver, check_distinct,
                   check_resonance, pencil_is_singular)
from .errors import DegenerateData

DEFAULT_SVD_TOL = 1e-10


def _as_tuple(points):
    t = tuple(complex(p) for p in np.atleast_1d(points))
    if not t:
        raise ValueError("multi-tuples must be nonempty")
    return t


@dataclass(frozen=True)
class MultiTupleSet:
    left: tuple
    right: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", tuple(_as_tuple(t) for t in self.left))
        object.__setattr__(self, "right", tuple(_as_tuple(t) for t in self.right))

    @property
    def q(self) -> int:
        return sum(len(t) for t in self.left)

    @property
    def k(self) -> int:
        return sum(len(t) for t in self.right)

    def right_members(self, i):
        """Nested members of right tuple ``i``: ``(λ_1,), (λ_2, λ_1), ...``."""
        t = self.right[i]
        return [t[len(t) - m:] for m in range(1, len(t) + 1)]

    def left_members(self, j):
        t = self.left[j]
        return [t[:m] for m in range(1, len(t) + 1)]


@dataclass(frozen=True, eq=False)
class LoewnerData:
    """``(𝕃, 𝕃s, V, W, T)`` together with the tuples that produced it."""

    Lw: np.ndarray
    Lws: np.ndarray
    V: np.ndarray
    W: np.ndarray
    T: np.ndarray
    tuples: MultiTupleSet | None = None

    def __post_init__(self):
        for name in ("Lw", "Lws", "V", "W", "T"):
            arr = np.array(getattr(self, name), dtype=complex)
            if name in ("Lw", "Lws", "T"):
                arr = np.atleast_2d(arr)
            else:
                arr = np.atleast_1d(arr).ravel()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def shape(self):
        return self.Lw.shape


def _right_harmonics(lam, kappa):
    # outermost-first: (κλ, ..., 2λ, λ)
    return tuple(k * lam for k in range(kappa, 0, -1))


def moment_tuples(gen: GeneratorPair, kappa: int) -> MultiTupleSet:
    """Left ``{μ_i}`` and right ``{λ_i}, {2λ_i, λ_i}, ..., {κλ_i, ..., λ_i}``."""
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    check_distinct(gen)
    check_resonance(gen, kappa)
    return MultiTupleSet(
        left=[(mu,) for mu in gen.mu],
        right=[_right_harmonics(lam, kappa) for lam in gen.lam],
    )


def blf_tuples(gen: GeneratorPair, kappa: int) -> MultiTupleSet:
    """Square variant of :func:`moment_tuples` for a bilinear ROM of order ρκ.

    The right tuples are those of :func:`moment_tuples`. Each left tuple is
    deepened to ``(μ_j, 2μ_j, ..., κμ_j)`` so that the pencil is ρκ x ρκ; its
    first member is still ``{μ_j}``, which keeps every moment-matching
    condition in the data.
    """
    mt = moment_tuples(gen, kappa)
    left = [tuple(k * mu for k in range(1, kappa + 1)) for mu in gen.mu]
    return MultiTupleSet(left=left, right=mt.right)


def reachability_block(sys: BilinearSystem, right_tuple) -> np.ndarray:
    """Columns ``Φ(λ_1)B, Φ(λ_2)NΦ(λ_1)B, ...`` for a right tuple (n x depth)."""
    pts = _as_tuple(right_tuple)
    cols = []
    w = PencilSolver(sys, pts[-1]).solve(sys.B)
    cols.append(w)
    for s in reversed(pts[:-1]):
        w = PencilSolver(sys, s).solve(sys.N @ w)
        cols.append(w)
    return np.column_stack(cols)


def observability_block(sys: BilinearSystem, left_tuple) -> np.ndarray:
    """Rows ``CΦ(μ_1), CΦ(μ_1)NΦ(μ_2), ...`` for a left tuple (depth x n)."""
    pts = _as_tuple(left_tuple)
    rows = []
    r = PencilSolver(sys, pts[0]).solve_left(sys.C)
    rows.append(r)
    for s in pts[1:]:
        r = PencilSolver(sys, s).solve_left(r @ sys.N)
        rows.append(r)
    return np.vstack(rows)


def generalized_matrices(sys: BilinearSystem, tuples: MultiTupleSet):
    """Observability ``O`` (q x n) and reachability ``R`` (n x k)."""
    if not tuples.left or not tuples.right:
        raise ValueError("both left and right tuple lists must be nonempty")
    O = np.vstack([observability_block(sys, t) for t in tuples.left])
    R = np.hstack([reachability_block(sys, t) for t in tuples.right])
    return O, R


def assemble_loewner(sys: BilinearSystem, tuples: MultiTupleSet) -> LoewnerData:
    O, R = generalized_matrices(sys, tuples)
    return LoewnerData(
        Lw=-O @ sys.E @ R,
        Lws=-O @ sys.A @ R,
        V=O @ sys.B,
        W=sys.C @ R,
        T=O @ sys.N @ R,
        tuples=tuples,
    )


def loewner_singular_values(data: LoewnerData):
    """Singular values of ``[𝕃 𝕃s]`` and ``[𝕃; 𝕃s]``."""
    sy = np.linalg.svd(np.hstack([data.Lw, data.Lws]), compute_uv=False)
    sx = np.linalg.svd(np.vstack([data.Lw, data.Lws]), compute_uv=False)
    return sy, sx


def blf_rom(data: LoewnerData, svd_rel_tol: float = DEFAULT_SVD_TOL,
            max_order: int | None = None) -> BilinearSystem:
    """Bilinear ROM ``(-𝕃, -𝕃s, T, V, W)`` from Loewner data.

    A square pencil of full numerical rank is used as is. Otherwise (redundant
    or rectangular data, or ``max_order`` below the data size) all five
    matrices are projected onto the leading singular subspaces of ``[𝕃 𝕃s]``
    (left) and ``[𝕃; 𝕃s]`` (right), truncated at ``svd_rel_tol`` relative to
    the largest singular value.
    """
    q, k = data.Lw.shape
    if q < 1 or k < 1:
        raise ValueError("Loewner data must have at least one row and column")
    Y, sy, _ = np.linalg.svd(np.hstack([data.Lw, data.Lws]), full_matrices=False)
    _, sx, Xh = np.linalg.svd(np.vstack([data.Lw, data.Lws]), full_matrices=False)
    if sy[0] == 0 or sx[0] == 0:
        raise DegenerateData("Loewner data is identically zero")
    r = min(int(np.sum(sy > svd_rel_tol * sy[0])), int(np.sum(sx > svd_rel_tol * sx[0])))
    if max_order is not None:
        r = min(r, int(max_order))
    if r < 1:
        raise DegenerateData("all singular values fall below the truncation threshold")

    if q == k and r == q and not pencil_is_singular(data.Lw, data.Lws):
        return BilinearSystem(-data.Lw, -data.Lws, data.T, data.V, data.W)

    Yr = Y[:, :r]
    Xr = Xh[:r].conj().T
    Yh = Yr.conj().T
    return BilinearSystem(
        E=-Yh @ data.Lw @ Xr,
        A=-Yh @ data.Lws @ Xr,
        N=Yh @ data.T @ Xr,
        B=Yh @ data.V,
        C=data.W @ Xr,
    )
