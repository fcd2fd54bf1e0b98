import numpy as np
import pytest

from biloewner import (BilinearSystem, DegenerateData, GeneratorPair, LoewnerData,
                       MultiTupleSet, ResonanceError, assemble_loewner, blf_rom, blf_tuples,
                       eval_generalized_tf, moment_tuples, observability_block,
                       reachability_block, reduce_blf)
from biloewner.pencil import generalized_matrices
from biloewner.rom import check_interpolation
from suite import random_system, s1, s1_gen, suite_case


def test_moment_tuples_layout():
    t = moment_tuples(s1_gen(), 2)
    assert t.left == ((3,),)
    assert t.right == ((2, 1),)
    assert t.right_members(0) == [(1,), (2, 1)]


def test_moment_tuples_resonance():
    with pytest.raises(ResonanceError) as info:
        moment_tuples(s1_gen(), 3)
    assert (info.value.i, info.value.j, info.value.k) == (1, 1, 3)


def test_kappa_one_tuples_are_depth_one():
    t = moment_tuples(GeneratorPair.unit([1j, 2j], [5j, 7j]), 1)
    assert all(len(r) == 1 for r in t.right)


def test_blf_tuples_are_square():
    t = blf_tuples(GeneratorPair.unit([1j, 2j], [5j, 7j]), 3)
    assert t.q == t.k == 6
    assert t.left[0] == (5j, 10j, 15j)


def test_reachability_scalar():
    np.testing.assert_allclose(reachability_block(s1(), (2, 1)), [[1 / 2, 1 / 6]], rtol=1e-15)


def test_reachability_depth_one():
    sys = random_system(1, 4)
    col = reachability_block(sys, (1j,))
    np.testing.assert_allclose(col[:, 0], np.linalg.solve(1j * sys.E - sys.A, sys.B))


def test_reachability_linear_second_column_zero():
    sys = random_system(1, 4)
    lin = BilinearSystem(sys.E, sys.A, np.zeros_like(sys.N), sys.B, sys.C)
    assert np.all(reachability_block(lin, (2j, 1j))[:, 1] == 0)


def test_observability_scalar():
    np.testing.assert_allclose(observability_block(s1(), (3,)), [[1 / 4]], rtol=1e-15)
    np.testing.assert_allclose(observability_block(s1(), (3, 2)), [[1 / 4], [1 / 12]], rtol=1e-15)


def test_observability_zero_output():
    sys = random_system(1, 4)
    z = BilinearSystem(sys.E, sys.A, sys.N, sys.B, np.zeros(4))
    assert np.all(observability_block(z, (1j, 2j)) == 0)


def test_scalar_loewner_data():
    d = assemble_loewner(s1(), MultiTupleSet(left=[(3,)], right=[(1,)]))
    for got, want in ((d.Lw, -1 / 8), (d.Lws, 1 / 8), (d.V, 1 / 4), (d.W, 1 / 2), (d.T, 1 / 8)):
        assert abs(got.item() - want) <= 1e-15


def test_linear_divided_differences():
    sys = random_system(11, 6, descriptor=True)
    lin = BilinearSystem(sys.E, sys.A, np.zeros_like(sys.N), sys.B, sys.C)
    lam = [0.5j, 1.3j, 2.1j]
    mu = [0.8j, 1.7j, 2.9j]
    d = assemble_loewner(lin, MultiTupleSet(left=[(m,) for m in mu], right=[(l,) for l in lam]))
    H = lambda s: eval_generalized_tf(lin, [s])
    for j, m in enumerate(mu):
        for i, l in enumerate(lam):
            L = (H(m) - H(l)) / (m - l)
            Ls = (m * H(m) - l * H(l)) / (m - l)
            assert abs(d.Lw[j, i] - L) <= 1e-10 * abs(L)
            assert abs(d.Lws[j, i] - Ls) <= 1e-10 * abs(Ls)


def test_empty_tuple_list_rejected():
    with pytest.raises(ValueError):
        assemble_loewner(s1(), MultiTupleSet(left=[], right=[(1,)]))


def test_factored_recomputation_is_exact():
    sys = random_system(5, 8)
    tuples = blf_tuples(GeneratorPair.unit([0.7j, 1.1j], [1.9j, 2.6j]), 2)
    d = assemble_loewner(sys, tuples)
    O, R = generalized_matrices(sys, tuples)
    assert np.array_equal(d.Lw, -O @ sys.E @ R)
    assert np.array_equal(d.Lws, -O @ sys.A @ R)


def test_scalar_rom_is_exact():
    d = assemble_loewner(s1(), MultiTupleSet(left=[(3,)], right=[(1,)]))
    rom = blf_rom(d)
    for got, want in ((rom.E, 1 / 8), (rom.A, -1 / 8), (rom.N, 1 / 8), (rom.B, 1 / 4), (rom.C, 1 / 2)):
        assert abs(got.item() - want) <= 1e-15
    for s in (0.5, 2j, 3 - 1j):
        assert abs(eval_generalized_tf(rom, [s]) - 1 / (s + 1)) <= 1e-14


def test_verbatim_path():
    sys = random_system(2, 6)
    d = assemble_loewner(sys, blf_tuples(GeneratorPair.unit([0.7j, 1.1j], [1.9j, 2.6j]), 2))
    rom = blf_rom(d, svd_rel_tol=0.0)
    assert np.array_equal(rom.E, -d.Lw) and np.array_equal(rom.A, -d.Lws)
    assert np.array_equal(rom.N, d.T) and np.array_equal(rom.B, d.V) and np.array_equal(rom.C, d.W)


def test_zero_data_is_degenerate():
    z = np.zeros((2, 2))
    with pytest.raises(DegenerateData):
        blf_rom(LoewnerData(z, z, np.zeros(2), np.zeros(2), z))


def test_max_order_truncates():
    sys = random_system(2, 8)
    rom = reduce_blf(sys, GeneratorPair.unit([0.7j, 1.1j], [1.9j, 2.6j]), 2, max_order=3)
    assert rom.n == 3


@pytest.mark.parametrize("seed", [1, 4, 5, 9])
def test_blf_order_is_rho_kappa(seed):
    case = suite_case(seed)
    rom = reduce_blf(case.system, case.gen, case.kappa, svd_rel_tol=1e-12)
    assert rom.n == min(case.gen.rho * case.kappa, case.system.n)


@pytest.mark.parametrize("seed", range(0, 20, 3))
def test_interpolation_families(seed):
    case = suite_case(seed)
    rom = reduce_blf(case.system, case.gen, case.kappa, svd_rel_tol=1e-12)
    report = check_interpolation(case.system, rom, case.gen, case.kappa, tol=1e-8)
    assert report.passed, report.max_rel_err
