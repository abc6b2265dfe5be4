"""Gauge fields on trivial principal groupoid bundles.

A gauge field is a bundle map ``theta: TM -> A`` over ``f: M -> base(A)``,
stored as one SmoothMap ``u -> (f^i(u), theta^a_mu(u))`` so that a single
jet evaluation yields everything the curvature needs.  ``theta`` is
flattened row-major as ``theta[a, mu]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from nlgauge.algebroid import AForm, ASection, LieAlgebroid, d_A, lie_derivative, structure_from_generators
from nlgauge.smoothcalc import Chart, SmoothMap, as_array, primal, sample_points, value_and_jacobian

# lambda_t = lambda + TRANSPORT_SIGN * t * L_eps lambda keeps F_theta(lambda) invariant to first order
TRANSPORT_SIGN = -1.0


class FlowError(RuntimeError):
    pass


class BasisMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GaugeField:
    source: Chart
    A: LieAlgebroid
    fields: SmoothMap  # u -> (f, theta[a, mu]) flattened
    name: str = ""

    def __post_init__(self):
        n, r, m = self.A.base.dim, self.A.rank, self.source.dim
        if self.fields.codim != n + r * m:
            raise ValueError(f"gauge field needs {n + r * m} components, got {self.fields.codim}")
        if self.fields.domain != self.source:
            raise ValueError("gauge field must be defined on its source chart")

    @classmethod
    def from_maps(cls, A: LieAlgebroid, f: SmoothMap, theta: SmoothMap, name: str = "") -> "GaugeField":
        if f.codim != A.base.dim:
            raise ValueError("f must map into the algebroid base")
        if theta.codim != A.rank * f.domain.dim:
            raise ValueError("theta must have rank * dim(M) components")

        def body(u):
            return list(f(u)) + list(theta(u))

        return cls(f.domain, A, SmoothMap(f.domain, f.codim + theta.codim, body, name), name)

    @classmethod
    def from_exprs(cls, A: LieAlgebroid, source: Chart, f_sources: Sequence[str],
                   theta_sources: Sequence[str], name: str = "") -> "GaugeField":
        """``theta_sources`` are listed row-major: theta^1_1, theta^1_2, ..., theta^r_m."""
        f = SmoothMap.from_exprs(source, list(f_sources), "f")
        theta = SmoothMap.from_exprs(source, list(theta_sources), "theta")
        return cls.from_maps(A, f, theta, name)

    @property
    def dims(self):
        return self.A.base.dim, self.A.rank, self.source.dim

    def split(self, values):
        n, r, m = self.dims
        values = as_array(values)
        return values[:n], values[n:].reshape(r, m)

    def f(self, u) -> np.ndarray:
        return self.split(self.fields(u))[0]

    def theta(self, u) -> np.ndarray:
        return self.split(self.fields(u))[1]

    @property
    def f_map(self) -> SmoothMap:
        n = self.A.base.dim
        return SmoothMap(self.source, n, lambda u: self.fields(u)[:n], "f")

    @property
    def theta_map(self) -> SmoothMap:
        n, r, m = self.dims
        return SmoothMap(self.source, r * m, lambda u: self.fields(u)[n:], "theta")

    def jet(self, u):
        """``f[i], df[i, mu], theta[a, mu], dtheta[a, nu, mu] = d_mu theta^a_nu``."""
        n, r, m = self.dims
        v, J = value_and_jacobian(self.fields, u)
        return v[:n], J[:n], v[n:].reshape(r, m), J[n:].reshape(r, m, m)


@dataclass(frozen=True)
class MForm:
    """Exterior form on the source chart; degree-2 coefficients flattened ``[mu, nu]``."""

    degree: int
    coeffs: SmoothMap

    def __call__(self, u):
        v = as_array(self.coeffs(u))
        if self.degree == 0:
            return v[0]
        if self.degree == 2:
            m = self.coeffs.domain.dim
            return v.reshape(m, m)
        return v


# -- curvature -------------------------------------------------------------

def _anchor_residual_from_jet(A, f, df, theta):
    return df - A.rho(tuple(f)) @ theta


def _field_strength_from_jet(A, f, theta, dtheta):
    curl = np.transpose(dtheta, (0, 2, 1)) - dtheta  # [a, mu, nu] = d_mu th_nu - d_nu th_mu
    return curl + np.einsum("abc,bm,cn->amn", A.C(tuple(f)), theta, theta)


def anchor_residual(g: GaugeField, u) -> np.ndarray:
    """``T[i, mu] = d_mu f^i - rho^i_a(f) theta^a_mu``."""
    f, df, theta, _ = g.jet(u)
    return _anchor_residual_from_jet(g.A, f, df, theta)


def field_strength(g: GaugeField, u) -> np.ndarray:
    """``F[a, mu, nu] = d_mu theta^a_nu - d_nu theta^a_mu + C^a_bc(f) theta^b_mu theta^c_nu``."""
    f, _, theta, dtheta = g.jet(u)
    return _field_strength_from_jet(g.A, f, theta, dtheta)


def pullback(g: GaugeField, omega: AForm) -> MForm:
    """``theta^* omega`` for omega of degree 0, 1 or 2."""
    n, r, m = g.dims

    if omega.degree == 0:
        def body(u):
            f, _ = g.split(g.fields(u))
            return [omega.coeffs(tuple(f))[0]]
        return MForm(0, SmoothMap(g.source, 1, body, "pullback"))
    if omega.degree == 1:
        def body(u):
            f, theta = g.split(g.fields(u))
            return list(np.einsum("a,an->n", as_array(omega.coeffs(tuple(f))), theta))
        return MForm(1, SmoothMap(g.source, m, body, "pullback"))

    def body(u):
        f, theta = g.split(g.fields(u))
        w = as_array(omega.coeffs(tuple(f))).reshape(r, r)
        return list(np.einsum("am,ab,bn->mn", theta, w, theta).ravel())
    return MForm(2, SmoothMap(g.source, m * m, body, "pullback"))


def d_M(omega: MForm) -> MForm:
    """de Rham differential on degrees 0 and 1 of the source chart."""
    m = omega.coeffs.domain.dim
    if omega.degree == 0:
        def body(u):
            _, J = value_and_jacobian(omega.coeffs, u)
            return list(J[0])
        return MForm(1, SmoothMap(omega.coeffs.domain, m, body, "d_M"))
    if omega.degree == 1:
        def body(u):
            _, J = value_and_jacobian(omega.coeffs, u)  # J[nu, mu] = d_mu w_nu
            return list((J.T - J).ravel())
        return MForm(2, SmoothMap(omega.coeffs.domain, m * m, body, "d_M"))
    raise ValueError("d_M implemented on degrees 0 and 1")


def _as_function(h, chart: Chart) -> AForm:
    if isinstance(h, AForm):
        return h
    if isinstance(h, SmoothMap):
        return AForm(0, h)
    if isinstance(h, str):
        return AForm(0, SmoothMap.from_exprs(chart, [h]))
    return AForm(0, SmoothMap(chart, 1, lambda x: [h(x)], "h"))


def curvature(g: GaugeField, omega: AForm) -> MForm:
    """``F_theta omega = d_M(theta^* omega) - theta^*(d_A omega)`` computed literally."""
    first = d_M(pullback(g, omega))
    second = pullback(g, d_A(g.A, omega))

    def body(u):
        return list(as_array(first.coeffs(u)) - as_array(second.coeffs(u)))

    return MForm(omega.degree + 1, SmoothMap(g.source, first.coeffs.codim, body, "F_theta"))


def curvature_on_function(g: GaugeField, h, u) -> np.ndarray:
    """Value of ``F_theta h`` at ``u`` (a covector on M)."""
    return curvature(g, _as_function(h, g.A.base))(u)


def curvature_on_oneform(g: GaugeField, lam: AForm, u) -> np.ndarray:
    """Value of ``F_theta lambda`` at ``u`` (an antisymmetric ``[mu, nu]`` matrix)."""
    if lam.degree != 1:
        raise ValueError("curvature_on_oneform needs a 1-form on A")
    return curvature(g, lam)(u)


def oneform_decomposition(g: GaugeField, lam: AForm, u) -> np.ndarray:
    """``lambda_a(f) F^a + T^j_mu d_j lambda_a theta^a_nu - (mu <-> nu)``, the component route."""
    f, df, theta, dtheta = g.jet(u)
    T = _anchor_residual_from_jet(g.A, f, df, theta)
    F = _field_strength_from_jet(g.A, f, theta, dtheta)
    lv, lJ = value_and_jacobian(lam.coeffs, tuple(f))  # lJ[a, j]
    S = np.einsum("jm,aj,an->mn", T, lJ, theta)
    return np.einsum("a,amn->mn", lv, F) + S - S.T


def _max_abs(arr) -> float:
    arr = np.asarray(arr, dtype=float)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


@dataclass
class FlatnessReport:
    max_T: float
    max_F: float
    flat: bool
    tol: float
    worst_T: list | None = None
    worst_F: list | None = None

    def as_dict(self) -> dict:
        return {"max_T": self.max_T, "max_F": self.max_F, "flat": self.flat, "tol": self.tol,
                "worst_T": self.worst_T, "worst_F": self.worst_F}


def default_points(g: GaugeField, n: int = 100, seed: int = 0):
    return sample_points(g.source, n, seed)


def is_flat(g: GaugeField, tol: float = 1e-8, pts=None) -> FlatnessReport:
    """Flat iff both the anchor residual and the field strength vanish on ``pts``."""
    pts = default_points(g) if pts is None else pts
    max_T = max_F = 0.0
    worst_T = worst_F = None
    for u in pts:
        u = tuple(float(v) for v in u)
        f, df, theta, dtheta = g.jet(u)
        t = _max_abs(_anchor_residual_from_jet(g.A, f, df, theta))
        F = _max_abs(_field_strength_from_jet(g.A, f, theta, dtheta))
        if worst_T is None or t > max_T:
            max_T, worst_T = max(t, max_T), list(u)
        if worst_F is None or F > max_F:
            max_F, worst_F = max(F, max_F), list(u)
    return FlatnessReport(max_T, max_F, max_T <= tol and max_F <= tol, tol, worst_T, worst_F)


def coordinate_functions(A: LieAlgebroid) -> list:
    n = A.base.dim
    return [AForm(0, SmoothMap(A.base, 1, (lambda x, i=i: [x[i]]), f"x{i + 1}")) for i in range(n)]


def basis_covectors(A: LieAlgebroid) -> list:
    r = A.rank
    return [AForm(1, SmoothMap.constant(A.base, np.eye(r)[a], f"e^{a + 1}")) for a in range(r)]


@dataclass
class MorphismReport:
    max_residual: float
    per_generator: dict
    morphism: bool
    tol: float

    def as_dict(self) -> dict:
        return {"max_residual": self.max_residual, "per_generator": self.per_generator,
                "morphism": self.morphism, "tol": self.tol}


def morphism_residual(g: GaugeField, functions=None, covectors=None, pts=None,
                      tol: float = 1e-8) -> MorphismReport:
    """Max of ``|F_theta(gen)|`` over generators; chain-map test of the morphism property."""
    functions = coordinate_functions(g.A) if functions is None else [_as_function(h, g.A.base) for h in functions]
    covectors = basis_covectors(g.A) if covectors is None else list(covectors)
    if not functions and not covectors:
        raise ValueError("need at least one generator")
    pts = default_points(g) if pts is None else pts
    gens = [(f"h{k}", curvature(g, h)) for k, h in enumerate(functions)]
    gens += [(f"lambda{k}", curvature(g, lam)) for k, lam in enumerate(covectors)]
    per = {name: 0.0 for name, _ in gens}
    for u in pts:
        u = tuple(float(v) for v in u)
        for name, op in gens:
            per[name] = max(per[name], _max_abs(op(u)))
    worst = max(per.values())
    return MorphismReport(worst, per, worst <= tol, tol)


# -- gauge parameters and transformations ----------------------------------

@dataclass(frozen=True)
class GaugeParameter:
    """Infinitesimal gauge parameter.

    Either ``components`` (eps^a as functions of u on the source chart) or
    ``section`` (a section of A, pulled back along f) is set.
    """

    components: SmoothMap | None = None
    section: ASection | None = None

    def __post_init__(self):
        if (self.components is None) == (self.section is None):
            raise ValueError("set exactly one of components / section")

    @classmethod
    def on_source(cls, components: SmoothMap) -> "GaugeParameter":
        return cls(components=components)

    @classmethod
    def pulled_back(cls, section: ASection) -> "GaugeParameter":
        return cls(section=section)

    @property
    def is_pulled_back(self) -> bool:
        return self.section is not None

    def at(self, g: GaugeField, u) -> np.ndarray:
        if self.components is not None:
            return as_array(self.components(u))
        return as_array(self.section.components(tuple(g.f(u))))


MODES = ("source", "bisection", "chain")


def _mode_for(eps: GaugeParameter, mode: str | None) -> str:
    if mode is None:
        return "bisection" if eps.is_pulled_back else "source"
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if (mode == "source") == eps.is_pulled_back:
        raise ValueError(f"mode {mode!r} does not match the parameter kind")
    return mode


def _velocity(A: LieAlgebroid, eps: GaugeParameter, mode: str, f, theta, J, src):
    """Right-hand side of the gauge flow at one source point.

    ``src`` carries ``(eps(u), d eps(u))`` for source parameters.  ``J`` is the
    prolonged jacobian ``d f`` used by the chain-rule mode.
    """
    fx = tuple(f)
    rho, C = A.rho(fx), A.C(fx)
    if mode == "source":
        e, de = src
        df = rho @ e
        dth = de + np.einsum("abc,bm,c->am", C, theta, e)
        return df, dth, None
    e, De = value_and_jacobian(eps.section.components, fx)  # De[a, j]
    df = rho @ e
    rot = np.einsum("abc,bm,c->am", C, theta, e)
    if mode == "bisection":
        return df, De @ (rho @ theta) + rot, None
    # chain rule: d_mu (eps-hat o f) = De . J, with J prolonged along the flow
    _, Dv = value_and_jacobian(lambda x: list(A.rho(x) @ as_array(eps.section.components(x))), fx)
    return df, De @ J + rot, Dv @ J


def infinitesimal_gauge(g: GaugeField, eps: GaugeParameter, mode: str | None = None):
    """``(delta f, delta theta)`` as SmoothMaps on the source chart.

    Source parameters: ``delta f = rho(f) eps``, ``delta theta = d eps + C(f)(theta, eps)``.
    Pulled-back parameters default to the bisection form
    ``delta theta = (d_j eps-hat) rho^j(theta) + C(f)(theta, eps-hat)``; ``mode="chain"``
    uses ``d_mu (eps-hat o f)`` instead (the two agree when the anchor condition holds).
    """
    mode = _mode_for(eps, mode)
    n, r, m = g.dims

    def both(u):
        if mode == "chain":
            f, J, theta, _ = g.jet(u)
        else:
            (f, theta), J = g.split(g.fields(u)), None
        src = value_and_jacobian(eps.components, u) if mode == "source" else None
        return _velocity(g.A, eps, mode, f, theta, J, src)

    df = SmoothMap(g.source, n, lambda u: list(both(u)[0]), "delta_f")
    dth = SmoothMap(g.source, r * m, lambda u: list(np.ravel(both(u)[1])), "delta_theta")
    return df, dth


def _rk4_point(A, eps, mode, f, theta, J, src, t, steps, check_box):
    h = t / steps
    for _ in range(steps):
        k1 = _velocity(A, eps, mode, f, theta, J, src)
        s2 = [y + 0.5 * h * k if y is not None else None for y, k in zip((f, theta, J), k1)]
        k2 = _velocity(A, eps, mode, *s2, src)
        s3 = [y + 0.5 * h * k if y is not None else None for y, k in zip((f, theta, J), k2)]
        k3 = _velocity(A, eps, mode, *s3, src)
        s4 = [y + h * k if y is not None else None for y, k in zip((f, theta, J), k3)]
        k4 = _velocity(A, eps, mode, *s4, src)
        out = []
        for y, a, b, c, d in zip((f, theta, J), k1, k2, k3, k4):
            out.append(None if y is None else y + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d))
        f, theta, J = out
        if check_box and not A.base.contains([primal(v) for v in f], slack=1e-9):
            raise FlowError(f"flow left the base box at f = {[primal(v) for v in f]}")
    return f, theta


def flow_gauge(g: GaugeField, eps: GaugeParameter, t: float, steps: int = 100,
               mode: str | None = None, check_box: bool = True) -> GaugeField:
    """Gauge field at flow time ``t`` under the infinitesimal transformation ``eps``.

    The flow is pointwise in u; it is integrated with classic RK4 on demand at
    every evaluation point, so u-derivatives of the result are exact
    derivatives of the discrete flow.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    mode = _mode_for(eps, mode)
    if t == 0:
        return g
    n, r, m = g.dims

    def body(u):
        if mode == "chain":
            f, J, theta, _ = g.jet(u)
        else:
            f, theta = g.split(g.fields(u))
            J = None
        src = value_and_jacobian(eps.components, u) if mode == "source" else None
        f, theta = _rk4_point(g.A, eps, mode, f, theta, J, src, t, steps, check_box)
        return list(f) + list(np.ravel(theta))

    return GaugeField(g.source, g.A, SmoothMap(g.source, n + r * m, body, f"flow[{t}]"),
                      f"{g.name}~flow({t})")


# -- finite transformations for matrix groups ------------------------------

def expm_generic(X) -> np.ndarray:
    """Matrix exponential by scaling and squaring a Taylor series; dual-friendly."""
    X = np.asarray(X, dtype=object)
    k = X.shape[0]
    norm = max(sum(abs(primal(v)) for v in row) for row in X)
    s = 0
    while norm > 0.25:
        norm /= 2.0
        s += 1
    Y = X * (0.5 ** s)
    out = np.eye(k, dtype=object) * 1.0
    term = np.eye(k, dtype=object) * 1.0
    for j in range(1, 19):
        term = (term @ Y) * (1.0 / j)
        out = out + term
    for _ in range(s):
        out = out @ out
    return as_array(out)


def inverse_generic(M) -> np.ndarray:
    """Gauss-Jordan inverse with partial pivoting on primal values; dual-friendly."""
    M = np.asarray(M, dtype=object)
    k = M.shape[0]
    aug = np.concatenate([M.copy(), np.eye(k, dtype=object) * 1.0], axis=1)
    for col in range(k):
        piv = max(range(col, k), key=lambda i: abs(primal(aug[i, col])))
        if abs(primal(aug[piv, col])) == 0.0:
            raise np.linalg.LinAlgError("singular matrix")
        aug[[col, piv]] = aug[[piv, col]]
        aug[col] = aug[col] * (1.0 / aug[col, col])
        for i in range(k):
            if i != col:
                aug[i] = aug[i] - aug[i, col] * aug[col]
    return as_array(aug[:, k:])


@dataclass(frozen=True)
class GroupGauge:
    """Finite gauge transformation ``u -> R(u)`` in a matrix group with Lie algebra basis."""

    R: SmoothMap  # u -> k*k entries, row-major
    generators: np.ndarray
    name: str = ""

    @property
    def k(self) -> int:
        return int(np.asarray(self.generators).shape[1])

    def matrix(self, u) -> np.ndarray:
        return as_array(self.R(u)).reshape(self.k, self.k)

    def check_orthogonal(self, n: int = 100, seed: int = 0) -> dict:
        orth = det = 0.0
        for u in sample_points(self.R.domain, n, seed):
            R = np.asarray(self.matrix(tuple(u)), dtype=float)
            orth = max(orth, _max_abs(R.T @ R - np.eye(self.k)))
            det = max(det, abs(np.linalg.det(R) - 1.0))
        return {"orthogonality": orth, "determinant": det}

    @classmethod
    def exponential(cls, eps: SmoothMap, generators, t: float = 1.0) -> "GroupGauge":
        """``R(u) = exp(t eps^a(u) E_a)``."""
        E = np.asarray(generators, dtype=float)

        def body(u):
            e = as_array(eps(u))
            X = np.einsum("a,aij->ij", e * t, E)
            return list(expm_generic(X).ravel())

        return cls(SmoothMap(eps.domain, E.shape[1] ** 2, body, "exp"), E, "exp")


def _component_solver(E) -> np.ndarray:
    r, k = E.shape[0], E.shape[1]
    return np.linalg.pinv(E.reshape(r, k * k).T)


def apply_group_gauge(g: GaugeField, gauge: GroupGauge) -> GaugeField:
    """``theta' = Ad_{R^-1} theta + R^-1 dR`` in the generator basis.

    ``f`` is unchanged for Lie algebras (base a point or zero anchor) and moves
    by the right action ``f' = R^-1 f`` for matrix action algebroids.
    """
    A = g.A
    E = np.asarray(gauge.generators, dtype=float)
    if A.constant_structure is None:
        raise BasisMismatchError("algebroid has non-constant structure functions")
    if E.shape[0] != A.rank or not np.allclose(structure_from_generators(E), A.constant_structure, atol=1e-12):
        raise BasisMismatchError("generator basis does not reproduce the algebroid structure constants")
    zero_anchor = all(_max_abs(A.rho(tuple(x))) == 0 for x in sample_points(A.base, 3, 0))
    acts_on_base = (not zero_anchor and A.generators is not None and E.shape[1] == A.base.dim
                    and np.allclose(A.generators, E))
    if not (zero_anchor or acts_on_base):
        raise BasisMismatchError("finite gauge only defined for Lie algebras and matrix actions")
    n, r, m = g.dims
    k = E.shape[1]
    solve = _component_solver(E)

    def body(u):
        Rv, RJ = value_and_jacobian(gauge.R, u)
        R = Rv.reshape(k, k)
        dR = RJ.reshape(k, k, m)
        Rinv = inverse_generic(R)
        f, theta = g.split(g.fields(u))
        new_theta = np.empty((r, m), dtype=object)
        for mu in range(m):
            Th = np.einsum("a,aij->ij", theta[:, mu], E)
            X = Rinv @ Th @ R + Rinv @ dR[:, :, mu]
            new_theta[:, mu] = solve @ X.ravel()
        new_f = Rinv @ f if acts_on_base else f
        return list(new_f) + list(new_theta.ravel())

    return GaugeField(g.source, A, SmoothMap(g.source, n + r * m, body, "group_gauge"),
                      f"{g.name}~R")


def adjoint_components(E, R, x) -> np.ndarray:
    """Components of ``R^-1 (x^a E_a) R`` for a vector (or stack ``[a, ...]``) ``x``."""
    E = np.asarray(E, dtype=float)
    solve = _component_solver(E)
    Rinv = inverse_generic(R)
    x = as_array(x)
    flat = x.reshape(x.shape[0], -1)
    out = []
    for j in range(flat.shape[1]):
        X = Rinv @ np.einsum("a,aij->ij", flat[:, j], E) @ R
        out.append(solve @ X.ravel())
    return as_array(np.stack(out, axis=1).reshape(x.shape))


# -- covariance of the curvature --------------------------------------------

def transported_function(A, eps_hat: ASection, h: AForm, t: float, sign: float = TRANSPORT_SIGN) -> AForm:
    """First-order transport ``h + sign * t * rho(eps) h``."""
    Lh = lie_derivative(A, eps_hat, h)

    def body(x):
        return [as_array(h.coeffs(x))[0] + sign * t * as_array(Lh.coeffs(x))[0]]

    return AForm(0, SmoothMap(A.base, 1, body, "h_t"))


def transported_oneform(A, eps_hat: ASection, lam: AForm, t: float, sign: float = TRANSPORT_SIGN) -> AForm:
    """First-order transport ``lambda + sign * t * L_eps lambda``."""
    L = lie_derivative(A, eps_hat, lam)

    def body(x):
        return list(as_array(lam.coeffs(x)) + sign * t * as_array(L.coeffs(x)))

    return AForm(1, SmoothMap(A.base, A.rank, body, "lambda_t"))


def _automorphism_flow(A, eps_hat: ASection, x, tau: float, steps: int):
    """Base point ``Phi_tau(x)`` and fiber matrix ``M(tau, x)`` of the automorphism generated by eps-hat."""
    r = A.rank

    def rhs(y, M):
        yx = tuple(y)
        e, De = value_and_jacobian(eps_hat.components, yx)
        rho = A.rho(yx)
        K = np.einsum("cba,a->cb", A.C(yx), e) + De @ rho
        return rho @ e, K @ M

    y = as_array(list(x))
    M = np.eye(r) * 1.0
    h = tau / steps
    for _ in range(steps):
        a1 = rhs(y, M)
        a2 = rhs(y + 0.5 * h * a1[0], M + 0.5 * h * a1[1])
        a3 = rhs(y + 0.5 * h * a2[0], M + 0.5 * h * a2[1])
        a4 = rhs(y + h * a3[0], M + h * a3[1])
        y = y + (h / 6.0) * (a1[0] + 2.0 * a2[0] + 2.0 * a3[0] + a4[0])
        M = M + (h / 6.0) * (a1[1] + 2.0 * a2[1] + 2.0 * a3[1] + a4[1])
    return y, M


def exact_transport(A, eps_hat: ASection, omega: AForm, t: float, steps: int = 40,
                    sign: float = TRANSPORT_SIGN) -> AForm:
    """Pull back ``omega`` (degree 0 or 1) by the automorphism flow at time ``sign * t``."""
    tau = sign * t

    def body(x):
        y, M = _automorphism_flow(A, eps_hat, x, tau, steps)
        val = as_array(omega.coeffs(tuple(y)))
        if omega.degree == 0:
            return [val[0]]
        return list(val @ M)

    return AForm(omega.degree, SmoothMap(A.base, omega.coeffs.codim, body, "transported"))


@dataclass
class CovarianceReport:
    ts: list
    r_function: list
    r_oneform: list
    ratios: list
    orders: list
    transport: str
    mode: str

    @property
    def residuals(self) -> list:
        return [max(a, b) for a, b in zip(self.r_function, self.r_oneform)]

    def as_dict(self) -> dict:
        return {"ts": self.ts, "r_function": self.r_function, "r_oneform": self.r_oneform,
                "residuals": self.residuals, "ratios": self.ratios, "orders": self.orders,
                "transport": self.transport, "mode": self.mode}


def covariance_check(g: GaugeField, eps_hat: ASection, lam: AForm, h=None,
                     ts: Sequence[float] = (0.2, 0.1, 0.05), steps: int = 100, pts=None,
                     transport: str = "linear", mode: str = "bisection",
                     sign: float = TRANSPORT_SIGN) -> CovarianceReport:
    """Residual ``r(t) = |F_{theta_t}(lambda_t) - F_theta(lambda)|`` along a pulled-back gauge flow.

    With ``transport="linear"`` the forms move to first order only, so r(t)
    is O(t^2) exactly when the first-order variation cancels; ``ratios``
    holds ``r(t_k) / r(t_{k+1})``.  ``transport="exact"`` pulls the forms back
    by the full automorphism flow and r(t) should vanish to integration error.
    """
    A = g.A
    pts = sample_points(g.source, 5, 0) if pts is None else pts
    pts = [tuple(float(v) for v in u) for u in pts]
    h = coordinate_functions(A)[0] if h is None else _as_function(h, A.base)
    eps = GaugeParameter.pulled_back(eps_hat)
    F0_lam = [np.asarray(curvature_on_oneform(g, lam, u), float) for u in pts]
    F0_h = [np.asarray(curvature_on_function(g, h, u), float) for u in pts]
    r_f, r_l = [], []
    for t in ts:
        gt = flow_gauge(g, eps, t, steps, mode=mode, check_box=False)
        if transport == "linear":
            lam_t = transported_oneform(A, eps_hat, lam, t, sign)
            h_t = transported_function(A, eps_hat, h, t, sign)
        elif transport == "exact":
            lam_t = exact_transport(A, eps_hat, lam, t, sign=sign)
            h_t = exact_transport(A, eps_hat, h, t, sign=sign)
        else:
            raise ValueError("transport must be 'linear' or 'exact'")
        rl = max(_max_abs(np.asarray(curvature_on_oneform(gt, lam_t, u), float) - F0)
                 for u, F0 in zip(pts, F0_lam))
        rf = max(_max_abs(np.asarray(curvature_on_function(gt, h_t, u), float) - F0)
                 for u, F0 in zip(pts, F0_h))
        r_l.append(rl)
        r_f.append(rf)
    res = [max(a, b) for a, b in zip(r_f, r_l)]
    ratios, orders = [], []
    for k in range(len(ts) - 1):
        if res[k + 1] > 0:
            ratio = res[k] / res[k + 1]
            ratios.append(ratio)
            orders.append(float(np.log(ratio) / np.log(ts[k] / ts[k + 1])) if ratio > 0 else float("nan"))
        else:
            ratios.append(float("inf") if res[k] > 0 else float("nan"))
            orders.append(float("nan"))
    return CovarianceReport(list(ts), r_f, r_l, ratios, orders, transport, mode)
