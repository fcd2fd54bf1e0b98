"""Generalized (Volterra) transfer functions of bilinear systems.

``H_l(s_1, ..., s_l) = C Φ(s_1) N Φ(s_2) N ... N Φ(s_l) B``; points are passed
outermost-first, so ``s_l`` is the resolvent applied to ``B``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .core import BilinearSystem, PencilSolver
from .errors import SingularPencilAt

MAX_LEVEL = 12


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("BILOEWNER_THREADS", "1")))
    except ValueError:
        return 1


def eval_generalized_tf(sys: BilinearSystem, points, max_level: int = MAX_LEVEL) -> complex:
    points = [complex(p) for p in points]
    level = len(points)
    if level < 1:
        raise ValueError("at least one evaluation point is required")
    if level > max_level:
        raise ValueError(f"level {level} exceeds the cap of {max_level}")
    w = PencilSolver(sys, points[-1]).solve(sys.B)
    for s in reversed(points[:-1]):
        w = PencilSolver(sys, s).solve(sys.N @ w)
    return complex(sys.C @ w)


def eval_tf_grid(sys: BilinearSystem, level: int, grid, max_level: int = MAX_LEVEL) -> list:
    """Evaluate ``H_level`` at every tuple of ``grid``; order is preserved."""
    grid = [tuple(p) for p in grid]
    for idx, pts in enumerate(grid):
        if len(pts) != level:
            raise ValueError(f"grid tuple {idx} has length {len(pts)}, expected {level}")

    def one(item):
        idx, pts = item
        try:
            return eval_generalized_tf(sys, pts, max_level=max_level)
        except SingularPencilAt as exc:
            raise exc.at_index(idx) from None

    workers = thread_count()
    if workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, enumerate(grid)))
    return [one(item) for item in enumerate(grid)]
