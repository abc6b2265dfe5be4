"""numba-compiled kernels, loop-for-loop equivalents of the numpy path."""

import numpy as np
from numba import njit


@njit(cache=True)
def fd4_derivative(y, h):
    n, d = y.shape
    out = np.empty((n, d))
    c = 1.0 / (12.0 * h)
    for j in range(d):
        for k in range(2, n - 2):
            out[k, j] = (-y[k + 2, j] + 8.0 * y[k + 1, j] - 8.0 * y[k - 1, j] + y[k - 2, j]) * c
        out[0, j] = (-25.0 * y[0, j] + 48.0 * y[1, j] - 36.0 * y[2, j] + 16.0 * y[3, j] - 3.0 * y[4, j]) * c
        out[1, j] = (-3.0 * y[0, j] - 10.0 * y[1, j] + 18.0 * y[2, j] - 6.0 * y[3, j] + y[4, j]) * c
        m = n - 1
        out[m, j] = (25.0 * y[m, j] - 48.0 * y[m - 1, j] + 36.0 * y[m - 2, j] - 16.0 * y[m - 3, j] + 3.0 * y[m - 4, j]) * c
        out[m - 1, j] = (3.0 * y[m, j] + 10.0 * y[m - 1, j] - 18.0 * y[m - 2, j] + 6.0 * y[m - 3, j] - y[m - 4, j]) * c
    return out


@njit(cache=True)
def _midpoint_interp_2d(y):
    n, d = y.shape
    out = np.empty((n - 1, d))
    for j in range(d):
        for k in range(1, n - 2):
            out[k, j] = (-y[k - 1, j] + 9.0 * y[k, j] + 9.0 * y[k + 1, j] - y[k + 2, j]) / 16.0
        out[0, j] = (5.0 * y[0, j] + 15.0 * y[1, j] - 5.0 * y[2, j] + y[3, j]) / 16.0
        m = n - 1
        out[m - 1, j] = (5.0 * y[m, j] + 15.0 * y[m - 1, j] - 5.0 * y[m - 2, j] + y[m - 3, j]) / 16.0
    return out


def midpoint_interp(y):
    y = np.ascontiguousarray(y, dtype=np.float64)
    flat = y.reshape(y.shape[0], -1)
    return _midpoint_interp_2d(flat).reshape((y.shape[0] - 1,) + y.shape[1:])


@njit(cache=True)
def _matvec(m, x):
    n = x.shape[0]
    out = np.zeros(n)
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += m[i, j] * x[j]
        out[i] = s
    return out


@njit(cache=True)
def _matmul(a, b):
    n = a.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        for k in range(n):
            aik = a[i, k]
            for j in range(n):
                out[i, j] += aik * b[k, j]
    return out


@njit(cache=True)
def rk4_linear(x0, m_nodes, m_mids, h):
    n_steps = m_mids.shape[0]
    out = np.empty((n_steps + 1, x0.shape[0]))
    x = x0.copy()
    out[0] = x
    for k in range(n_steps):
        k1 = _matvec(m_nodes[k], x)
        k2 = _matvec(m_mids[k], x + 0.5 * h * k1)
        k3 = _matvec(m_mids[k], x + 0.5 * h * k2)
        k4 = _matvec(m_nodes[k + 1], x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = x
    return out


@njit(cache=True)
def rk4_right_matrix(r0, w_nodes, w_mids, h):
    r = r0.copy()
    for k in range(w_mids.shape[0]):
        k1 = _matmul(r, w_nodes[k])
        k2 = _matmul(r + 0.5 * h * k1, w_mids[k])
        k3 = _matmul(r + 0.5 * h * k2, w_mids[k])
        k4 = _matmul(r + h * k3, w_nodes[k + 1])
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return r


@njit(cache=True)
def associativity_violations(comp):
    n = comp.shape[0]
    found = []
    for f in range(n):
        for g in range(n):
            fg = comp[f, g]
            if fg < 0:
                continue
            for h in range(n):
                gh = comp[g, h]
                if gh < 0:
                    continue
                if comp[fg, h] != comp[f, gh]:
                    found.append((f, g, h))
    out = np.empty((len(found), 3), dtype=np.int64)
    for i in range(len(found)):
        out[i, 0] = found[i][0]
        out[i, 1] = found[i][1]
        out[i, 2] = found[i][2]
    return out
