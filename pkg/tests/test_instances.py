import numpy as np
import pytest

from sgdreg.instances import (
    InstanceError,
    add_noise,
    dump_instance,
    load_instance,
    make_instance,
    make_true_solution,
    precondition,
    source_element,
    synthesize_from_source,
)
from sgdreg.testproblems import make_problem


def gravity_instance(n=16, nu=1.0, eps=1e-2, seed=11):
    prob = make_problem("gravity", n)
    x_dag = make_true_solution(prob.A, prob.x_e, nu)
    return make_instance(prob.A, x_dag, nu, eps, seed)


def test_true_solution_unit_max_norm():
    prob = make_problem("gravity", 16)
    for nu in (0.0, 0.5, 1.0, 2.0):
        x = make_true_solution(prob.A, prob.x_e, nu)
        assert np.max(np.abs(x)) == pytest.approx(1.0)


def test_synthesize_and_recover_source_roundtrip():
    rng = np.random.default_rng(0)
    prob = make_problem("shaw", 10)
    x1 = np.zeros(10)
    w = rng.standard_normal(10)
    for nu in (0.5, 1.0, 2.0):
        x_dag = synthesize_from_source(prob.A, x1, nu, w)
        w_rec, w_norm, resid = source_element(prob.A, x1, x_dag, nu)
        assert resid <= 1e-6 * np.linalg.norm(x_dag - x1)
        # recovered element reproduces the same smoothed difference
        x_back = synthesize_from_source(prob.A, x1, nu, w_rec)
        assert np.allclose(x_back, x_dag, atol=1e-8)
        assert w_norm <= np.linalg.norm(w) * (1 + 1e-8)


def test_source_element_raises_for_rough_target():
    prob = make_problem("gravity", 12)
    rough = np.zeros(12)
    rough[3] = 1.0  # a spike is not in the range of a high smoothness power
    with pytest.raises(InstanceError):
        source_element(prob.A, np.zeros(12), rough, 4.0)


def test_add_noise_deterministic_and_scaled():
    y = np.linspace(1.0, 2.0, 8)
    y1, xi1, d1 = add_noise(y, 1e-2, seed=5)
    y2, xi2, d2 = add_noise(y, 1e-2, seed=5)
    np.testing.assert_array_equal(y1, y2)
    assert d1 == d2 > 0
    np.testing.assert_allclose(y1 - y, 1e-2 * np.max(np.abs(y)) * xi1)
    y0, xi0, d0 = add_noise(y, 0.0, seed=5)
    assert d0 == 0.0 and not np.any(xi0)
    np.testing.assert_array_equal(y0, y)


def test_instance_invariants():
    inst = gravity_instance()
    assert inst.delta == pytest.approx(np.linalg.norm(inst.xi))
    assert inst.delta_bar == pytest.approx(inst.delta / np.sqrt(inst.n))
    np.testing.assert_allclose(inst.y_delta, inst.y_dag + inst.xi)
    with pytest.raises(InstanceError):
        make_instance(inst.A, np.zeros(15), 1.0, 0.0, 0)


def test_precondition_preserves_normal_matrix():
    inst = gravity_instance()
    a_t, y_t = precondition(inst.A, inst.y_delta)
    np.testing.assert_allclose(a_t.T @ a_t, inst.A.T @ inst.A, atol=1e-12 * np.max(np.abs(inst.A.T @ inst.A)))
    # rows of the transformed matrix are pairwise orthogonal
    g = a_t @ a_t.T
    off = g - np.diag(np.diag(g))
    assert np.max(np.abs(off)) <= 1e-10 * np.linalg.norm(a_t, ord=2) ** 2
    # data norm preserved by the orthogonal rotation
    assert np.linalg.norm(y_t) == pytest.approx(np.linalg.norm(inst.y_delta))


def test_manifest_roundtrip(tmp_path):
    inst = gravity_instance()
    dump_instance(inst, tmp_path / "inst.json", tmp_path / "matrix.csv")
    back = load_instance(tmp_path / "inst.json")
    np.testing.assert_allclose(back.A, inst.A, atol=1e-12)
    np.testing.assert_array_equal(back.y_delta, inst.y_delta)
    assert back.delta == inst.delta
    assert back.nu == inst.nu
