import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sgdreg.numerics import (
    NumericsError,
    power_iteration_norm,
    spectral_norm,
    svd,
    sym_eig,
    sym_power,
)


def random_matrix(seed, n=5, m=4):
    return np.random.default_rng(seed).standard_normal((n, m))


def test_svd_reconstructs():
    a = random_matrix(0)
    u, s, v = svd(a)
    assert np.allclose(u @ np.diag(s) @ v.T, a, atol=1e-12)
    assert np.all(np.diff(s) <= 0)


def test_svd_orthonormal_factors():
    a = random_matrix(1, 6, 6)
    u, s, v = svd(a)
    assert np.allclose(u.T @ u, np.eye(u.shape[1]), atol=1e-12)
    assert np.allclose(v.T @ v, np.eye(v.shape[1]), atol=1e-12)


def test_spectral_norm_matches_power_iteration():
    a = random_matrix(2, 8, 8)
    assert spectral_norm(a) == pytest.approx(power_iteration_norm(a), rel=1e-8)


def test_sym_eig_rejects_asymmetric():
    with pytest.raises(NumericsError):
        sym_eig(random_matrix(3, 4, 4))


def test_sym_eig_clamps_tiny_negative():
    s = np.diag([1.0, 1e-14, 0.0])
    lam, _ = sym_eig(s - 2e-14 * np.eye(3))
    assert np.all(lam >= 0)


def test_sym_eig_rejects_indefinite():
    s = np.diag([1.0, -0.5, 2.0])
    with pytest.raises(NumericsError):
        sym_eig(s)


def test_sym_power_zero_is_identity():
    a = random_matrix(4, 5, 5)
    s = a.T @ a
    assert np.allclose(sym_power(s, 0.0), np.eye(5), atol=1e-12)


def test_sym_power_halves_compose():
    a = random_matrix(5, 5, 5)
    s = a.T @ a
    half = sym_power(s, 0.5)
    assert np.allclose(half @ half, s, atol=1e-10 * spectral_norm(s))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.floats(0.25, 3.0))
def test_sym_power_spectrum(seed, p):
    a = np.random.default_rng(seed).standard_normal((4, 4)) * 0.7
    s = a.T @ a
    lam, _ = sym_eig(s)
    lam_p, _ = sym_eig(sym_power(s, p))
    assert np.allclose(np.sort(lam_p), np.sort(lam**p), atol=1e-9 * max(1.0, lam.max() ** p))
