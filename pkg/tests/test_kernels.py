import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlgauge import kernels
from nlgauge.groupoid_finite import pair_groupoid

BACKENDS = [kernels.numpy_kernels] + ([kernels.numba_kernels] if kernels.numba_kernels else [])


def _so3_gens():
    E = np.zeros((3, 3, 3))
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        E[a, c, b], E[a, b, c] = 1.0, -1.0
    return E


@pytest.mark.parametrize("impl", BACKENDS)
def test_fd4_exact_on_quartics(impl):
    t = np.linspace(0.0, 1.0, 17)
    y = np.stack([t ** 4 - 2 * t ** 3, 3 * t - t ** 2], axis=1)
    d = impl.fd4_derivative(y, t[1] - t[0])
    exact = np.stack([4 * t ** 3 - 6 * t ** 2, 3 - 2 * t], axis=1)
    assert np.max(np.abs(d - exact)) <= 1e-11


@pytest.mark.parametrize("impl", BACKENDS)
def test_midpoint_exact_on_cubics(impl):
    t = np.linspace(0.0, 2.0, 11)
    f = lambda s: s ** 3 - 4 * s + 1
    m = impl.midpoint_interp(f(t)[:, None])
    assert np.max(np.abs(m[:, 0] - f(0.5 * (t[1:] + t[:-1])))) <= 1e-12


def _time_dependent(N):
    """W(t) = cos(t) E1 + t E2 sampled at nodes and midpoints."""
    E = _so3_gens()
    t = np.linspace(0.0, 1.0, N + 1)
    tm = t[:-1] + 0.5 / N
    W = lambda s: np.cos(s)[:, None, None] * E[0] + s[:, None, None] * E[1]
    return W(t), W(tm)


def _order(errors):
    return [float(np.log2(a / b)) for a, b in zip(errors, errors[1:])]


@pytest.mark.parametrize("impl", BACKENDS)
def test_rk4_linear_is_fourth_order(impl):
    x0 = np.array([0.3, 1.0, -0.5])
    ref_n, ref_m = _time_dependent(2048)
    ref = impl.rk4_linear(x0, ref_n, ref_m, 1.0 / 2048)[-1]
    errs = []
    for N in (8, 16, 32):
        n, m = _time_dependent(N)
        errs.append(np.max(np.abs(impl.rk4_linear(x0, n, m, 1.0 / N)[-1] - ref)))
    assert all(3.5 <= q <= 4.5 for q in _order(errs))


@pytest.mark.parametrize("impl", BACKENDS)
def test_rk4_right_matrix_constant_generator(impl):
    E = _so3_gens()
    N = 512
    W = np.repeat((np.pi * E[0])[None], N + 1, axis=0)
    R = impl.rk4_right_matrix(np.eye(3), W, W[:-1], 1.0 / N)
    assert np.max(np.abs(R - np.diag([1.0, -1.0, -1.0]))) <= 1e-9


def test_pair_groupoid_is_associative():
    G = pair_groupoid(4)
    assert kernels.associativity_violations(G.comp).shape == (0, 3)


@pytest.mark.skipif(kernels.numba_kernels is None, reason="numba not installed")
@given(st.integers(0, 2 ** 31 - 1))
def test_backends_agree(seed):
    rng = np.random.default_rng(seed)
    y = rng.normal(size=(12, 3))
    h = float(rng.uniform(0.01, 1.0))
    nb, npk = kernels.numba_kernels, kernels.numpy_kernels
    assert np.allclose(nb.fd4_derivative(y, h), npk.fd4_derivative(y, h), rtol=1e-13, atol=1e-12)
    assert np.allclose(nb.midpoint_interp(y), npk.midpoint_interp(y), rtol=1e-13, atol=1e-13)
    M = rng.normal(size=(12, 3, 3))
    x0 = rng.normal(size=3)
    assert np.allclose(nb.rk4_linear(x0, M, M[:-1], 0.05), npk.rk4_linear(x0, M, M[:-1], 0.05),
                       rtol=1e-12, atol=1e-12)
    assert np.allclose(nb.rk4_right_matrix(np.eye(3), M, M[:-1], 0.05),
                       npk.rk4_right_matrix(np.eye(3), M, M[:-1], 0.05), rtol=1e-12, atol=1e-12)
    comp = rng.integers(-1, 6, size=(6, 6))
    assert np.array_equal(nb.associativity_violations(comp), npk.associativity_violations(comp))


def test_short_inputs_rejected():
    with pytest.raises(ValueError):
        kernels.fd4_derivative(np.zeros((4, 1)), 0.1)
    with pytest.raises(ValueError):
        kernels.midpoint_interp(np.zeros((3, 1)))
