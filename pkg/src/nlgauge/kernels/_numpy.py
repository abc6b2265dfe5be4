"""Pure-numpy kernels; the reference path and the fallback when numba is off."""

import numpy as np


def fd4_derivative(y, h):
    """Fourth-order d/dt of samples ``y[k, :]`` on a uniform grid (needs >= 5 rows)."""
    y = np.asarray(y, dtype=float)
    d = np.empty_like(y)
    d[2:-2] = (-y[4:] + 8.0 * y[3:-1] - 8.0 * y[1:-3] + y[:-4]) / (12.0 * h)
    d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h)
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h)
    d[-1] = (25.0 * y[-1] - 48.0 * y[-2] + 36.0 * y[-3] - 16.0 * y[-4] + 3.0 * y[-5]) / (12.0 * h)
    d[-2] = (3.0 * y[-1] + 10.0 * y[-2] - 18.0 * y[-3] + 6.0 * y[-4] - y[-5]) / (12.0 * h)
    return d


def midpoint_interp(y):
    """Cubic Lagrange values at the N cell midpoints of N+1 samples (needs >= 4 rows)."""
    y = np.asarray(y, dtype=float)
    m = np.empty((y.shape[0] - 1,) + y.shape[1:])
    m[1:-1] = (-y[:-3] + 9.0 * y[1:-2] + 9.0 * y[2:-1] - y[3:]) / 16.0
    m[0] = (5.0 * y[0] + 15.0 * y[1] - 5.0 * y[2] + y[3]) / 16.0
    m[-1] = (5.0 * y[-1] + 15.0 * y[-2] - 5.0 * y[-3] + y[-4]) / 16.0
    return m


def rk4_linear(x0, m_nodes, m_mids, h):
    """Integrate x' = M(t) x with classic RK4; M given at nodes and midpoints."""
    n_steps = m_mids.shape[0]
    out = np.empty((n_steps + 1, x0.shape[0]))
    x = np.array(x0, dtype=float)
    out[0] = x
    for k in range(n_steps):
        k1 = m_nodes[k] @ x
        k2 = m_mids[k] @ (x + 0.5 * h * k1)
        k3 = m_mids[k] @ (x + 0.5 * h * k2)
        k4 = m_nodes[k + 1] @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = x
    return out


def rk4_right_matrix(r0, w_nodes, w_mids, h):
    """Integrate R' = R W(t) with classic RK4 and return R at the final time."""
    r = np.array(r0, dtype=float)
    for k in range(w_mids.shape[0]):
        k1 = r @ w_nodes[k]
        k2 = (r + 0.5 * h * k1) @ w_mids[k]
        k3 = (r + 0.5 * h * k2) @ w_mids[k]
        k4 = (r + h * k3) @ w_nodes[k + 1]
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return r


def associativity_violations(comp):
    """Composable triples (f, g, h) with (fg)h != f(gh); ``comp`` uses -1 for undefined."""
    comp = np.asarray(comp)
    n = comp.shape[0]
    f, g, h = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    fg = comp[f, g]
    gh = comp[g, h]
    ok = (fg >= 0) & (gh >= 0)
    left = np.where(ok, comp[np.where(ok, fg, 0), h], -1)
    right = np.where(ok, comp[f, np.where(ok, gh, 0)], -1)
    bad = ok & (left != right)
    return np.argwhere(bad).astype(np.int64)
