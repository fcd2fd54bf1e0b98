import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biloewner import BilinearSystem, SingularPencilAt, eval_generalized_tf, eval_tf_grid
from suite import random_system, rel_err, s1


def explicit_tf(sys, points):
    """Oracle: ``C Φ(s_1) N Φ(s_2) ... N Φ(s_l) B`` with explicit inverses."""
    n = sys.n
    M = np.eye(n, dtype=complex)
    for idx, s in enumerate(points):
        if idx:
            M = M @ sys.N
        M = M @ np.linalg.inv(s * sys.E - sys.A)
    return complex(sys.C @ M @ sys.B)


def test_level_one_scalar():
    assert eval_generalized_tf(s1(), [2.0]) == pytest.approx(1 / 3, abs=1e-16)


def test_level_two_scalar():
    assert eval_generalized_tf(s1(), [2.0, 1.0]) == pytest.approx(1 / 6, abs=1e-16)


def test_linear_system_has_no_higher_kernels():
    sys = random_system(3, 5)
    lin = BilinearSystem(sys.E, sys.A, np.zeros_like(sys.N), sys.B, sys.C)
    assert eval_generalized_tf(lin, [1j, 2j]) == 0
    assert eval_generalized_tf(lin, [1j, 2j, 3j]) == 0


def test_grid_scalar():
    vals = eval_tf_grid(s1(), 1, [(2.0,), (3.0,)])
    np.testing.assert_allclose(vals, [1 / 3, 1 / 4], rtol=1e-15)


def test_empty_grid():
    assert eval_tf_grid(s1(), 2, []) == []


def test_grid_wrong_length_names_index():
    with pytest.raises(ValueError, match="1"):
        eval_tf_grid(s1(), 2, [(1.0, 2.0), (1.0,)])


def test_grid_singular_point_reports_index():
    with pytest.raises(SingularPencilAt) as info:
        eval_tf_grid(s1(), 1, [(1.0,), (2.0,), (-1.0,)])
    assert info.value.index == 2


def test_level_cap():
    with pytest.raises(ValueError):
        eval_generalized_tf(s1(), [1.0] * 13)
    assert np.isfinite(eval_generalized_tf(s1(), [1.0] * 13, max_level=13))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 10), level=st.integers(1, 3))
def test_matches_explicit_inverse_oracle(seed, n, level):
    sys = random_system(seed, n, descriptor=bool(seed % 3 == 0))
    rng = np.random.default_rng(seed)
    pts = list(0.2 + 1j * rng.uniform(-3, 3, level))
    assert rel_err(eval_generalized_tf(sys, pts), explicit_tf(sys, pts)) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 10), level=st.integers(1, 3),
       alpha=st.complex_numbers(min_magnitude=0.1, max_magnitude=10))
def test_multilinear_in_b_and_c(seed, n, level, alpha):
    sys = random_system(seed, n)
    pts = list(1j * np.arange(1, level + 1))
    base = eval_generalized_tf(sys, pts)
    sb = BilinearSystem(sys.E, sys.A, sys.N, alpha * sys.B, sys.C)
    sc = BilinearSystem(sys.E, sys.A, sys.N, sys.B, alpha * sys.C)
    assert rel_err(eval_generalized_tf(sb, pts), alpha * base) <= 1e-12
    assert rel_err(eval_generalized_tf(sc, pts), alpha * base) <= 1e-12


def test_threaded_grid_matches_serial(monkeypatch):
    sys = random_system(7, 6)
    grid = [(1j * k, 0.5j) for k in range(1, 30)]
    monkeypatch.setenv("BILOEWNER_THREADS", "1")
    serial = eval_tf_grid(sys, 2, grid)
    monkeypatch.setenv("BILOEWNER_THREADS", "4")
    threaded = eval_tf_grid(sys, 2, grid)
    assert serial == threaded
