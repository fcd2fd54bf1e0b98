import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biloewner import BilinearSystem, GeneratorPair, SingularPencilAt, resolvent, validate_system
from biloewner.core import PencilSolver, find_resonances, pencil_is_singular
from suite import random_system, rel_err, s1


def test_scalar_stable_system_validates_clean():
    report = validate_system(s1())
    assert report.ok
    assert report.errors == [] and report.warnings == []
    assert report.spectral_abscissa == pytest.approx(-1.0, abs=1e-15)


def test_dimension_mismatch_is_reported():
    bad = BilinearSystem(np.eye(2), -np.eye(2), np.zeros((2, 2)), np.ones(3), np.ones(2))
    report = validate_system(bad)
    assert not report.ok
    assert any("B" in e for e in report.errors)


def test_resonance_warning_text():
    report = validate_system(s1(), GeneratorPair.unit([1.0], [3.0]), kappa_max=3)
    assert report.ok
    assert any("resonance 3·λ_1 = μ_1" in w for w in report.warnings)


def test_unstable_system_warns():
    unstable = BilinearSystem.from_dense([[0.5]], [[0.0]], [1.0], [1.0])
    report = validate_system(unstable)
    assert report.ok and report.warnings


def test_singular_pencil_is_an_error():
    sing = BilinearSystem(np.zeros((2, 2)), np.array([[1.0, 0], [0, 0]]), np.zeros((2, 2)),
                          np.ones(2), np.ones(2))
    assert pencil_is_singular(sing.E, sing.A)
    assert not validate_system(sing).ok


def test_nonfinite_entries_are_errors():
    bad = BilinearSystem.from_dense([[np.nan]], [[0.0]], [1.0], [1.0])
    assert not validate_system(bad).ok


def test_strict_imaginary_rejects_real_points():
    report = validate_system(s1(), GeneratorPair.unit([1.0], [3.0]), strict_imaginary=True)
    assert not report.ok


def test_duplicate_points_are_errors():
    report = validate_system(s1(), GeneratorPair.unit([1j, 1j], [3j, 4j]))
    assert not report.ok


def test_generator_length_mismatch():
    with pytest.raises(ValueError):
        GeneratorPair([1.0, 2.0], [1.0], [3.0, 4.0], [1.0, 1.0])


def test_find_resonances_indices_are_one_based():
    gen = GeneratorPair.unit([1.0, 5.0], [7.0, 3.0])
    assert (1, 2, 3) in find_resonances(gen, 3)
    assert find_resonances(gen, 2) == []


def test_resolvent_scalar():
    assert resolvent(s1(), 1.0)[0, 0] == pytest.approx(0.5, abs=1e-16)


def test_resolvent_identity_case():
    sys = BilinearSystem(np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)), np.ones(2), np.ones(2))
    np.testing.assert_allclose(resolvent(sys, 1.0), np.eye(2), atol=1e-15)


def test_resolvent_at_eigenvalue_raises():
    with pytest.raises(SingularPencilAt) as info:
        resolvent(s1(), -1.0)
    assert info.value.s == -1.0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 20),
       s1_im=st.floats(-5, 5), s2_im=st.floats(-5, 5))
def test_resolvent_identity(seed, n, s1_im, s2_im):
    sys = random_system(seed, n, descriptor=bool(seed % 2))
    a, b = 0.1 + 1j * s1_im, 0.3 + 1j * s2_im
    Pa, Pb = resolvent(sys, a), resolvent(sys, b)
    lhs = Pb @ sys.E @ Pa
    rhs = (Pa - Pb) / (b - a)
    assert rel_err(lhs, rhs) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(1, 20))
def test_solver_matches_dense_solve(seed, n):
    sys = random_system(seed, n)
    rng = np.random.default_rng(seed)
    s = complex(rng.uniform(-1, 1), rng.uniform(-3, 3))
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = PencilSolver(sys, s).solve(b)
    ref = np.linalg.solve(s * sys.E - sys.A, b)
    assert rel_err(x, ref) <= 1e-12
    c = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    assert rel_err(PencilSolver(sys, s).solve_left(c), np.linalg.solve((s * sys.E - sys.A).T, c)) <= 1e-12


def test_vector_field():
    np.testing.assert_allclose(s1().vector_field(np.array([2.0]), 3.0), [-2 + 6 + 3])
