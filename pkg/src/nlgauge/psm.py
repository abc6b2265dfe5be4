"""Poisson sigma model fields as gauge fields in the cotangent algebroid.

A field is a pair ``(X, eta)`` on a 2-dimensional source with
``eta[mu, i]`` flattened row-major.  It becomes a gauge field with ``f = X``
and ``theta^(i)_mu = eta_{mu i}``, and its equations of motion are
``r1 = T`` and ``r2 = F``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from nlgauge.algebroid import LieAlgebroid, cotangent_algebroid, poisson_jacobiator
from nlgauge.gauge import GaugeField, anchor_residual, field_strength, inverse_generic
from nlgauge.smoothcalc import Chart, SmoothMap, as_array, sample_points, value_and_jacobian


@dataclass(frozen=True, eq=False)
class PoissonStructure:
    chart: Chart
    pi: SmoothMap  # pi[i, j] flattened
    name: str = ""
    declared_poisson: bool = True

    def __post_init__(self):
        if self.pi.codim != self.chart.dim ** 2 or self.pi.domain != self.chart:
            raise ValueError("pi must be an n x n matrix field on the chart")

    @classmethod
    def from_exprs(cls, chart: Chart, entries: dict, name: str = "", declared_poisson: bool = True):
        """``entries`` maps ``(i, j)`` with ``i < j`` (0-based) to an expression; the rest is antisymmetric."""
        n = chart.dim
        src = [["0"] * n for _ in range(n)]
        for (i, j), e in entries.items():
            if not i < j:
                raise ValueError("give upper-triangular entries only")
            src[i][j] = f"({e})"
            src[j][i] = f"-({e})"
        pi = SmoothMap.from_exprs(chart, [src[i][j] for i in range(n) for j in range(n)], name)
        return cls(chart, pi, name, declared_poisson)

    def matrix(self, x) -> np.ndarray:
        n = self.chart.dim
        return as_array(self.pi(x)).reshape(n, n)

    def jacobiator(self, x) -> np.ndarray:
        return poisson_jacobiator(self.pi, x)

    @cached_property
    def algebroid(self) -> LieAlgebroid:
        return cotangent_algebroid(self.pi, f"cotangent({self.name})")

    def measure(self, n_points: int = 100, seed: int = 0) -> dict:
        antisym = jac = 0.0
        for x in sample_points(self.chart, n_points, seed):
            P = np.asarray(self.matrix(tuple(x)), float)
            antisym = max(antisym, float(np.max(np.abs(P + P.T))))
            jac = max(jac, float(np.max(np.abs(self.jacobiator(tuple(x))))))
        return {"antisymmetry": antisym, "jacobiator": jac}


@dataclass(frozen=True, eq=False)
class PSMField:
    source: Chart
    X: SmoothMap
    eta: SmoothMap  # eta[mu, i] flattened

    def __post_init__(self):
        if self.source.dim != 2:
            raise ValueError("the sigma model source is 2-dimensional")
        if self.X.domain != self.source or self.eta.domain != self.source:
            raise ValueError("X and eta live on the source chart")
        if self.eta.codim != 2 * self.X.codim:
            raise ValueError("eta needs 2 * dim(target) components")

    @classmethod
    def from_exprs(cls, source: Chart, X_sources, eta_sources) -> "PSMField":
        return cls(source, SmoothMap.from_exprs(source, list(X_sources), "X"),
                   SmoothMap.from_exprs(source, list(eta_sources), "eta"))


def as_gauge_field(ps: PoissonStructure, phi: PSMField) -> GaugeField:
    """``A = T*M``, ``f = X``, ``theta^(i)_mu = eta_{mu i}``."""
    if phi.X.codim != ps.chart.dim:
        raise ValueError("X must map into the Poisson chart")
    n, m = ps.chart.dim, 2

    def theta(u):
        e = phi.eta(u)
        return [e[mu * n + i] for i in range(n) for mu in range(m)]

    return GaugeField.from_maps(ps.algebroid, phi.X, SmoothMap(phi.source, n * m, theta, "theta"), "psm")


def from_gauge_field(g: GaugeField) -> PSMField:
    """Inverse of :func:`as_gauge_field`."""
    n, _, m = g.dims

    def eta(u):
        th = g.theta_map(u)
        return [th[i * m + mu] for mu in range(m) for i in range(n)]

    return PSMField(g.source, g.f_map, SmoothMap(g.source, n * m, eta, "eta"))


def eom_residual(ps: PoissonStructure, phi: PSMField, u) -> tuple:
    """``(r1[i, mu], r2[i, mu, nu])`` through the generic gauge-field operators."""
    g = as_gauge_field(ps, phi)
    return anchor_residual(g, u), field_strength(g, u)


def eom_components(ps: PoissonStructure, phi: PSMField, u) -> tuple:
    """The same residuals from the classical component formulas.

    ``r1 = d_mu X^i + pi^{ij}(X) eta_{mu j}`` and
    ``r2 = d_mu eta_{nu i} - d_nu eta_{mu i} + d_i pi^{jk}(X) eta_{mu j} eta_{nu k}``.
    """
    n = ps.chart.dim
    X, dX = value_and_jacobian(phi.X, u)  # dX[i, mu]
    e, de = value_and_jacobian(phi.eta, u)
    eta = e.reshape(2, n)
    deta = de.reshape(2, n, 2)  # deta[nu, i, mu] = d_mu eta_{nu i}
    P, dP = value_and_jacobian(ps.pi, tuple(X))
    P = P.reshape(n, n)
    dP = dP.reshape(n, n, n)  # dP[j, k, i] = d_i pi^{jk}
    r1 = dX + np.einsum("ij,mj->im", P, eta)
    curl = np.einsum("nim->imn", deta) - np.einsum("min->imn", deta)
    r2 = curl + np.einsum("jki,mj,nk->imn", dP, eta, eta)
    return r1, r2


def symplectic_on_shell(ps: PoissonStructure, X: SmoothMap) -> PSMField:
    """``eta_{mu j} = -(pi^-1)_{ji}(X) d_mu X^i``, which makes ``r1`` vanish."""
    n = ps.chart.dim

    def eta(u):
        Xv, dX = value_and_jacobian(X, u)
        Pinv = inverse_generic(ps.matrix(tuple(Xv)))
        out = -np.einsum("ji,im->mj", Pinv, dX)
        return list(out.ravel())

    return PSMField(X.domain, X, SmoothMap(X.domain, 2 * n, eta, "eta"))


def builtin_models() -> dict:
    """Named Poisson structures; non-Poisson entries carry ``declared_poisson = False``."""
    R2 = Chart.cube(("x1", "x2"), -2.0, 2.0)
    R3 = Chart.cube(("x1", "x2", "x3"), -2.0, 2.0)
    return {
        "sympl2": PoissonStructure.from_exprs(R2, {(0, 1): "1"}, "sympl2"),
        "su2": PoissonStructure.from_exprs(R3, {(0, 1): "x3", (1, 2): "x1", (0, 2): "-x2"}, "su2"),
        "nonpoisson": PoissonStructure.from_exprs(R3, {(0, 1): "x2", (1, 2): "x1"}, "nonpoisson", False),
        # log-canonical, so Poisson; its Jacobiator is measured, not assumed
        "quadratic": PoissonStructure.from_exprs(
            R3, {(0, 1): "x1*x2", (1, 2): "2*x2*x3", (0, 2): "-x1*x3"}, "quadratic"),
    }


def model(name: str) -> PoissonStructure:
    models = builtin_models()
    if name not in models:
        raise KeyError(f"unknown Poisson model {name!r}; known: {sorted(models)}")
    return models[name]


def catalog() -> dict:
    """Built-ins with their measured antisymmetry and Jacobiator."""
    out = {}
    for name, ps in builtin_models().items():
        out[name] = {"dim": ps.chart.dim, "declared_poisson": ps.declared_poisson, **ps.measure()}
    return out
