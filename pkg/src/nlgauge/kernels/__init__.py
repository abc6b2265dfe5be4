"""Hot numeric loops, compiled with numba unless ``NLGAUGE_DISABLE_NUMBA`` is set.

Both implementations stay importable (``numpy_kernels`` always,
``numba_kernels`` when numba is installed) so they can be cross-checked and
benchmarked against each other.
"""

import os

import numpy as np

from nlgauge.kernels import _numpy as numpy_kernels

try:
    from nlgauge.kernels import _numba as numba_kernels
except ImportError:  # numba not installed
    numba_kernels = None

_disabled = os.environ.get("NLGAUGE_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

if numba_kernels is not None and not _disabled:
    BACKEND = "numba"
    _impl = numba_kernels
else:
    BACKEND = "numpy"
    _impl = numpy_kernels


def fd4_derivative(y, h):
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.shape[0] < 5:
        raise ValueError("fourth-order stencil needs at least 5 samples")
    # differences against the first row keep constants exactly stationary
    flat = y.reshape(y.shape[0], -1)
    return _impl.fd4_derivative(flat - flat[0], float(h)).reshape(y.shape)


def midpoint_interp(y):
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.shape[0] < 4:
        raise ValueError("cubic midpoint interpolation needs at least 4 samples")
    return _impl.midpoint_interp(y)


def rk4_linear(x0, m_nodes, m_mids, h):
    return _impl.rk4_linear(np.ascontiguousarray(x0, dtype=np.float64),
                            np.ascontiguousarray(m_nodes, dtype=np.float64),
                            np.ascontiguousarray(m_mids, dtype=np.float64), float(h))


def rk4_right_matrix(r0, w_nodes, w_mids, h):
    return _impl.rk4_right_matrix(np.ascontiguousarray(r0, dtype=np.float64),
                                  np.ascontiguousarray(w_nodes, dtype=np.float64),
                                  np.ascontiguousarray(w_mids, dtype=np.float64), float(h))


def associativity_violations(comp):
    return _impl.associativity_violations(np.ascontiguousarray(comp, dtype=np.int64))


__all__ = [
    "BACKEND", "associativity_violations", "fd4_derivative", "midpoint_interp",
    "numba_kernels", "numpy_kernels", "rk4_linear", "rk4_right_matrix",
]
