"""Flat connections over the unit interval and their gauge homotopies.

An A-path is a pair of sampled curves ``x(t)`` in the base and ``a(t)`` in
the fiber with ``x' = rho(x) a``.  For action algebroids of matrix groups the
path integrates to the group element solving ``R' = R (a^a E_a)``, and the
base path is then the right action ``x(t) = R(t)^-1 x(0)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from nlgauge import kernels
from nlgauge.algebroid import LieAlgebroid, so3_action

MIN_INTERVALS = 8


class PathExitError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class APath:
    A: LieAlgebroid
    x: np.ndarray  # (N+1, n)
    a: np.ndarray  # (N+1, r)

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        a = np.array(self.a, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.A.base.dim:
            raise ValueError("x must have shape (N+1, dim base)")
        if a.shape != (x.shape[0], self.A.rank):
            raise ValueError("a must have shape (N+1, rank)")
        if x.shape[0] - 1 < MIN_INTERVALS:
            raise ValueError(f"need at least {MIN_INTERVALS} intervals")
        x.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "a", a)

    @property
    def N(self) -> int:
        return self.x.shape[0] - 1

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.N + 1)


@dataclass(frozen=True)
class Holonomy:
    R: np.ndarray
    x_start: np.ndarray
    x_end: np.ndarray

    def act(self, x) -> np.ndarray:
        """Right action ``x . R = R^-1 x``."""
        return np.linalg.solve(self.R, np.asarray(x, dtype=float))

    def consistency(self) -> float:
        return float(np.max(np.abs(self.act(self.x_start) - self.x_end)))

    def orthogonality(self) -> float:
        return float(np.max(np.abs(self.R.T @ self.R - np.eye(self.R.shape[0]))))


@dataclass(frozen=True)
class Homotopy:
    """Gauge parameter ``eps(t, s)`` on the unit square with its analytic t-derivative.

    ``eps(t, s)`` and ``deps_dt(t, s)`` take an array of times and a scalar s
    and return ``(len(t), r)`` arrays; eps must vanish at t = 0 and t = 1.
    """

    rank: int
    eps: Callable
    deps_dt: Callable
    s_steps: int = 20

    def boundary_defect(self, n: int = 11) -> float:
        return max(float(np.max(np.abs(self.eps(np.array([0.0, 1.0]), s))))
                   for s in np.linspace(0.0, 1.0, n))

    @classmethod
    def zero(cls, rank: int, s_steps: int = 1) -> "Homotopy":
        z = lambda t, s: np.zeros((np.size(t), rank))
        return cls(rank, z, z, s_steps)


def random_homotopy(rank: int, seed: int, modes: int = 3, amplitude: float = 0.5,
                    s_steps: int = 20) -> Homotopy:
    """``eps = sin^2(pi t) * sum_k (c_k(s) cos 2 pi k t + d_k(s) sin 2 pi k t)``, coefficients affine in s."""
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(2, modes + 1, rank)) * amplitude / (modes + 1)
    d = rng.normal(size=(2, modes + 1, rank)) * amplitude / (modes + 1)
    k = np.arange(modes + 1)

    def series(t, s):
        w = 2.0 * np.pi * np.outer(t, k)
        cs, ds = c[0] + s * c[1], d[0] + s * d[1]
        S = np.cos(w) @ cs + np.sin(w) @ ds
        dS = (2.0 * np.pi * k * -np.sin(w)) @ cs + (2.0 * np.pi * k * np.cos(w)) @ ds
        return S, dS

    def eps(t, s):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        S, _ = series(t, s)
        return (np.sin(np.pi * t) ** 2)[:, None] * S

    def deps(t, s):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        S, dS = series(t, s)
        bump = np.sin(np.pi * t) ** 2
        dbump = 2.0 * np.pi * np.sin(np.pi * t) * np.cos(np.pi * t)
        return dbump[:, None] * S + bump[:, None] * dS

    return Homotopy(rank, eps, deps, s_steps)


def fourier_curve(rank: int, seed: int, modes: int = 3, amplitude: float = 2.0) -> Callable:
    """Seeded smooth fiber curve ``a(t)`` (vectorized over t)."""
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(modes + 1, rank)) * amplitude / (modes + 1)
    d = rng.normal(size=(modes + 1, rank)) * amplitude / (modes + 1)
    k = np.arange(modes + 1)

    def a(t):
        w = 2.0 * np.pi * np.outer(np.atleast_1d(t), k)
        return np.cos(w) @ c + np.sin(w) @ d

    return a


# -- matrix action helpers -------------------------------------------------

def action_generators(A: LieAlgebroid) -> np.ndarray | None:
    """Generators E when A is the linear action algebroid with anchor ``v_a(x) = -E_a x``."""
    E = A.generators
    if E is None or E.ndim != 3 or E.shape[1] != A.base.dim or E.shape[2] != A.base.dim:
        return None
    x = np.linspace(0.3, 1.1, A.base.dim)
    expected = -np.einsum("aij,j->ia", E, x)
    return E if np.allclose(A.rho(tuple(x)), expected, atol=1e-14) else None


def _anchor_apply(A: LieAlgebroid, X: np.ndarray, e: np.ndarray) -> np.ndarray:
    E = action_generators(A)
    if E is not None:
        return -np.einsum("kb,bij,kj->ki", e, E, X)
    return np.array([A.rho(tuple(x)) @ v for x, v in zip(X, e)], dtype=float)


def _bracket_apply(A: LieAlgebroid, X: np.ndarray, a: np.ndarray, e: np.ndarray) -> np.ndarray:
    if A.constant_structure is not None:
        return np.einsum("cab,ka,kb->kc", A.constant_structure, a, e)
    return np.array([np.einsum("cab,a,b->c", A.C(tuple(x)), u, v) for x, u, v in zip(X, a, e)], dtype=float)


# -- operations ------------------------------------------------------------

def apath_residual(p: APath) -> float:
    """``max_k |x'(t_k) - rho(x_k) a_k|`` with a fourth-order difference for ``x'``."""
    h = 1.0 / p.N
    xdot = kernels.fd4_derivative(p.x, h)
    return float(np.max(np.abs(xdot - _anchor_apply(p.A, p.x, p.a))))


def _fiber_samples(a, N: int, r: int):
    """Fiber curve at nodes and at cubic-interpolated midpoints.

    Callables are sampled at the nodes first, so a path is a function of its
    stored samples alone and re-solving it (holonomy, homotopy projection)
    reproduces it to roundoff.
    """
    if callable(a):
        a = a(np.linspace(0.0, 1.0, N + 1))
    nodes = np.asarray(a, dtype=float).reshape(N + 1, r)
    return nodes, kernels.midpoint_interp(nodes)


def integrate_base(A: LieAlgebroid, a, x0, N: int, check_box: bool = True) -> APath:
    """Solve ``x' = rho(x) a(t)`` on ``[0, 1]`` by classic RK4 with ``N`` steps.

    ``a`` is a vectorized callable ``t -> (len(t), r)`` or an ``(N+1, r)``
    sample array; midpoint values come from cubic interpolation either way.
    """
    r, n = A.rank, A.base.dim
    x0 = np.asarray(x0, dtype=float)
    if check_box and not A.base.contains(x0):
        raise PathExitError(f"start point {x0.tolist()} outside the base box")
    nodes, mids = _fiber_samples(a, N, r)
    h = 1.0 / N
    E = action_generators(A)
    if E is not None:
        m_nodes = -np.einsum("ka,aij->kij", nodes, E)
        m_mids = -np.einsum("ka,aij->kij", mids, E)
        X = kernels.rk4_linear(x0, m_nodes, m_mids, h)
    else:
        X = np.empty((N + 1, n))
        X[0] = x = x0
        f = lambda y, v: A.rho(tuple(y)) @ v
        for k in range(N):
            k1 = f(x, nodes[k])
            k2 = f(x + 0.5 * h * k1, mids[k])
            k3 = f(x + 0.5 * h * k2, mids[k])
            k4 = f(x + h * k3, nodes[k + 1])
            x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            X[k + 1] = x
    if check_box:
        for k, xk in enumerate(X):
            if not A.base.contains(xk, slack=1e-12):
                raise PathExitError(f"path leaves the base box at t = {k * h}: {xk.tolist()}")
    return APath(A, X, nodes)


def holonomy(A: LieAlgebroid, p: APath) -> Holonomy:
    """Path-ordered exponential ``R' = R (a^a E_a)``, ``R(0) = I``."""
    E = action_generators(A)
    if E is None:
        raise ValueError("holonomy needs a linear action algebroid with matrix generators")
    w_nodes = np.einsum("ka,aij->kij", p.a, E)
    w_mids = np.einsum("ka,aij->kij", kernels.midpoint_interp(p.a), E)
    R = kernels.rk4_right_matrix(np.eye(E.shape[1]), w_nodes, w_mids, 1.0 / p.N)
    return Holonomy(R, p.x[0].copy(), p.x[-1].copy())


@dataclass(frozen=True)
class FlowResult:
    path: APath
    unprojected: APath
    residual: float
    unprojected_residual: float


def homotopy_flow(p: APath, hom: Homotopy, project: bool = True, track_unprojected: bool = False):
    """Flow ``(x, a)`` in s by ``dx = rho(x) eps``, ``da = eps' + C(x)(a, eps)`` with RK4 in s.

    With ``project`` the base path is re-solved from ``a`` after each s-step.
    Returns the flowed path, or a :class:`FlowResult` with the unprojected
    trajectory when ``track_unprojected`` is set.
    """
    if hom.rank != p.A.rank:
        raise ValueError("homotopy rank does not match the algebroid")
    A, t, N = p.A, p.t, p.N
    ds = 1.0 / hom.s_steps

    def rhs(X, a, s):
        e = hom.eps(t, s)
        return _anchor_apply(A, X, e), hom.deps_dt(t, s) + _bracket_apply(A, X, a, e)

    def run(projected: bool):
        X, a = np.array(p.x), np.array(p.a)
        for j in range(hom.s_steps):
            s = j * ds
            k1 = rhs(X, a, s)
            k2 = rhs(X + 0.5 * ds * k1[0], a + 0.5 * ds * k1[1], s + 0.5 * ds)
            k3 = rhs(X + 0.5 * ds * k2[0], a + 0.5 * ds * k2[1], s + 0.5 * ds)
            k4 = rhs(X + ds * k3[0], a + ds * k3[1], s + ds)
            X = X + (ds / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
            a = a + (ds / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
            if not (np.all(np.isfinite(X)) and np.all(np.isfinite(a))):
                raise FloatingPointError(f"homotopy flow diverged at s = {s + ds}")
            if projected:
                X = integrate_base(A, a, p.x[0], N, check_box=False).x
        return APath(A, X, a)

    out = run(project)
    if not track_unprojected:
        return out
    raw = out if not project else run(False)
    return FlowResult(out, raw, apath_residual(out), apath_residual(raw))


def matrix_distance(R1, R2) -> float:
    return float(np.linalg.norm(np.asarray(R1) - np.asarray(R2)))


def random_flat_path(A: LieAlgebroid, seed: int, N: int = 256, radius: float = 1.0) -> APath:
    rng = np.random.default_rng(seed)
    x0 = rng.normal(size=A.base.dim)
    x0 *= radius / np.linalg.norm(x0)
    return integrate_base(A, fourier_curve(A.rank, seed), x0, N)


def weinstein_experiment(A: LieAlgebroid | None = None, trials: int = 10, seed: int = 0, paths: int = 5,
                         N: int = 256, s_steps: int = 20, zero: bool = False) -> dict:
    """Holonomy and endpoint drift of random flat paths under random homotopy flows."""
    A = A or so3_action()
    records = []
    for i in range(paths):
        p = random_flat_path(A, seed * 1000 + i, N)
        H0 = holonomy(A, p)
        res0 = apath_residual(p)
        for j in range(trials):
            hom = Homotopy.zero(A.rank) if zero else random_homotopy(A.rank, seed * 1000 + 100 * i + j,
                                                                     s_steps=s_steps)
            fr = homotopy_flow(p, hom, track_unprojected=True)
            H1 = holonomy(A, fr.path)
            records.append({
                "path": i, "trial": j,
                "holonomy_drift": float(np.max(np.abs(H1.R - H0.R))),
                "endpoint_drift": float(np.max(np.abs(fr.path.x[-1] - p.x[-1]))),
                "start_drift": float(np.max(np.abs(fr.path.x[0] - p.x[0]))),
                "residual_before": res0,
                "residual_after": fr.residual,
                "unprojected_residual": fr.unprojected_residual,
                "unprojected_endpoint_drift": float(np.max(np.abs(fr.unprojected.x[-1] - p.x[-1]))),
                "consistency": H1.consistency(),
            })
    keys = ("holonomy_drift", "endpoint_drift", "start_drift", "residual_after", "unprojected_residual",
            "unprojected_endpoint_drift", "consistency")
    summary = {f"max_{k}": max(r[k] for r in records) for k in keys}
    return {"model": A.name, "paths": paths, "trials": trials, "N": N, "s_steps": s_steps,
            "seed": seed, "summary": summary, "records": records}


def separation_experiment(A: LieAlgebroid | None = None, seed: int = 0, trials: int = 3, N: int = 128) -> dict:
    """Rotations by pi/2 and pi about the first axis stay apart under homotopy flows."""
    A = A or so3_action()
    x0 = np.array([0.0, 1.0, 0.0])
    out = {"distances": []}
    paths = [integrate_base(A, lambda t, w=w: np.outer(np.ones_like(t), [w, 0.0, 0.0]), x0, N)
             for w in (np.pi / 2, np.pi)]
    for j in range(trials):
        hs = [holonomy(A, homotopy_flow(p, random_homotopy(A.rank, seed + 10 * j + k))) for k, p in enumerate(paths)]
        out["distances"].append(matrix_distance(hs[0].R, hs[1].R))
    out["min_distance"] = min(out["distances"])
    return out


def measured_order(errors, factor: float = 2.0) -> list:
    return [float(np.log(e0 / e1) / np.log(factor)) for e0, e1 in zip(errors, errors[1:])]


def write_path_csv(path: APath | None, dest, n: int | None = None, r: int | None = None) -> None:
    """CSV with columns ``t, x1.., a1..``; ``path=None`` writes the header only."""
    if path is not None:
        n, r = path.A.base.dim, path.A.rank
    header = ["t"] + [f"x{i + 1}" for i in range(n)] + [f"a{b + 1}" for b in range(r)]
    with open(dest, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        if path is not None:
            for tk, xk, ak in zip(path.t, path.x, path.a):
                w.writerow([repr(float(tk))] + [repr(float(v)) for v in xk] + [repr(float(v)) for v in ak])
