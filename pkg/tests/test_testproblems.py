import numpy as np
import pytest

from sgdreg.testproblems import (
    ProblemError,
    admissible_c0,
    make_problem,
    row_norm_constant,
)


@pytest.mark.parametrize("name", ["shaw", "gravity", "phillips"])
def test_shapes_and_determinism(name):
    p1 = make_problem(name, 16)
    p2 = make_problem(name, 16)
    assert p1.A.shape == (16, 16)
    assert p1.x_e.shape == (16,)
    np.testing.assert_array_equal(p1.A, p2.A)
    np.testing.assert_array_equal(p1.x_e, p2.x_e)


@pytest.mark.parametrize("name", ["shaw", "phillips"])
def test_symmetric_kernels_give_symmetric_matrices(name):
    a = make_problem(name, 24).A
    assert np.allclose(a, a.T, atol=1e-14 * np.max(np.abs(a)))


def test_phillips_is_toeplitz():
    a = make_problem("phillips", 16).A
    for d in range(16):
        diag = np.diagonal(a, offset=d)
        assert np.allclose(diag, diag[0], atol=1e-15)


def test_phillips_requires_multiple_of_four():
    with pytest.raises(ProblemError):
        make_problem("phillips", 18)


def test_unknown_problem_rejected():
    with pytest.raises(ProblemError):
        make_problem("heat", 16)


def test_small_n_rejected():
    with pytest.raises(ProblemError):
        make_problem("shaw", 2)


def test_matrices_converge_with_refinement():
    # midpoint/Galerkin discretizations approximate the same operator, so
    # row sums (integral of the kernel) stabilize as n grows
    for name in ("gravity", "phillips"):
        coarse = make_problem(name, 32)
        fine = make_problem(name, 64)
        # compare the kernel integral at matching interior points
        c = coarse.A.sum(axis=1)[len(coarse.grid) // 2]
        f = fine.A.sum(axis=1)[len(fine.grid) // 2]
        assert f == pytest.approx(c, rel=5e-2)


def test_row_norm_constant():
    a = np.array([[3.0, 4.0], [1.0, 0.0]])
    assert row_norm_constant(a) == pytest.approx(1.0 / 25.0)


@pytest.mark.parametrize("name", ["shaw", "gravity", "phillips"])
def test_admissible_c0_satisfies_all_constraints(name):
    a = make_problem(name, 20).A
    c0, report = admissible_c0(a, 0.0)
    assert c0 <= min(report["row_norm_bound"], 1.0) * (1 + 1e-12)
    assert c0 * report["B_norm"] <= 1.0 / (2 * np.e) * (1 + 1e-12)


def test_admissible_c0_rejects_bad_alpha():
    a = make_problem("shaw", 8).A
    with pytest.raises(ProblemError):
        admissible_c0(a, 1.0)
