"""Lie algebroids over a single chart: anchors, structure functions, d_A.

Index conventions (all arrays are dense numpy, possibly of dtype object when
dual numbers flow through):

* anchor ``rho[i, a]``: base index ``i``, fiber index ``a``; the anchor map
  SmoothMap returns it flattened row-major.
* structure ``C[c, a, b]`` with ``[e_a, e_b] = C[c, a, b] e_c``.
* a 2-form evaluates on a pair as ``omega(e_a, e_b) = omega[a, b]``, no 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from nlgauge.smoothcalc import Chart, SmoothMap, as_array, sample_points, value_and_jacobian
from nlgauge.smoothcalc import sin as dsin

DEFAULT_AXIOM_TOL = 1e-9
DEFAULT_AXIOM_POINTS = 100


@dataclass(frozen=True)
class LieAlgebroid:
    base: Chart
    rank: int
    anchor: SmoothMap
    structure: SmoothMap
    name: str = ""
    # matrix Lie algebra basis when the algebroid is a Lie algebra or a linear action
    generators: np.ndarray | None = None
    constant_structure: np.ndarray | None = None

    def __post_init__(self):
        n, r = self.base.dim, self.rank
        if self.anchor.codim != n * r:
            raise ValueError(f"anchor must have {n * r} components, got {self.anchor.codim}")
        if self.structure.codim != r ** 3:
            raise ValueError(f"structure must have {r ** 3} components, got {self.structure.codim}")
        if self.anchor.domain != self.base or self.structure.domain != self.base:
            raise ValueError("anchor and structure must live on the base chart")

    def rho(self, x) -> np.ndarray:
        return as_array(self.anchor(x)).reshape(self.base.dim, self.rank)

    def C(self, x) -> np.ndarray:
        r = self.rank
        return as_array(self.structure(x)).reshape(r, r, r)

    def rho_with_grad(self, x):
        """``rho[i, a]`` and ``drho[i, a, j] = d_j rho^i_a``."""
        v, J = value_and_jacobian(self.anchor, x)
        n, r = self.base.dim, self.rank
        return v.reshape(n, r), J.reshape(n, r, n)

    def C_with_grad(self, x):
        """``C[c, a, b]`` and ``dC[c, a, b, j]``."""
        v, J = value_and_jacobian(self.structure, x)
        r, n = self.rank, self.base.dim
        return v.reshape(r, r, r), J.reshape(r, r, r, n)

    @cached_property
    def axiom_report(self) -> dict:
        """Measured axiom residuals on the default seeded sample."""
        return measure_axioms(self)

    def is_valid(self, tol: float = DEFAULT_AXIOM_TOL) -> bool:
        rep = self.axiom_report
        return max(rep["antisymmetry"], rep["anchor_compat"], rep["jacobi"]) <= tol

    def with_structure(self, structure: SmoothMap, name: str | None = None) -> "LieAlgebroid":
        return LieAlgebroid(self.base, self.rank, self.anchor, structure,
                            name if name is not None else self.name + "*", None, None)


@dataclass(frozen=True)
class ASection:
    """Section of A: components ``eps^a(x)`` on the base."""

    components: SmoothMap

    def __call__(self, x):
        return as_array(self.components(x))


@dataclass(frozen=True)
class AForm:
    """Element of Omega^k(A) for k in {0, 1, 2, 3}; coefficients flattened row-major.

    Degree 3 only appears as the image of ``d_A`` on 2-forms.
    """

    degree: int
    coeffs: SmoothMap

    def __post_init__(self):
        if self.degree not in (0, 1, 2, 3):
            raise ValueError("only degrees 0 to 3 are represented")

    def __call__(self, x):
        v = as_array(self.coeffs(x))
        if self.degree == 0:
            return v[0]
        if self.degree >= 2:
            r = int(round(v.size ** (1.0 / self.degree)))
            return v.reshape((r,) * self.degree)
        return v


def section(chart: Chart, sources_or_body, rank: int | None = None, name: str = "") -> ASection:
    if callable(sources_or_body):
        return ASection(SmoothMap(chart, rank, sources_or_body, name))
    return ASection(SmoothMap.from_exprs(chart, list(sources_or_body), name))


def form(chart: Chart, degree: int, sources_or_body, size: int | None = None, name: str = "") -> AForm:
    if callable(sources_or_body):
        return AForm(degree, SmoothMap(chart, size, sources_or_body, name))
    return AForm(degree, SmoothMap.from_exprs(chart, list(sources_or_body), name))


# -- operations ------------------------------------------------------------

def bracket(A: LieAlgebroid, e1: ASection, e2: ASection) -> ASection:
    """Algebroid bracket of two sections."""

    def body(x):
        v1, J1 = value_and_jacobian(e1.components, x)
        v2, J2 = value_and_jacobian(e2.components, x)
        rho, C = A.rho(x), A.C(x)
        out = (np.einsum("cab,a,b->c", C, v1, v2)
               + np.einsum("ja,a,cj->c", rho, v1, J2)
               - np.einsum("jb,b,cj->c", rho, v2, J1))
        return list(out)

    return ASection(SmoothMap(A.base, A.rank, body, "bracket"))


def d_A(A: LieAlgebroid, omega: AForm) -> AForm:
    """Algebroid differential on forms of degree 0, 1 and 2."""
    r = A.rank
    if omega.degree == 0:
        def body(x):
            _, J = value_and_jacobian(omega.coeffs, x)
            return list(np.einsum("ja,j->a", A.rho(x), J[0]))

        return AForm(1, SmoothMap(A.base, r, body, "d_A"))
    if omega.degree == 1:
        def body(x):
            lam, J = value_and_jacobian(omega.coeffs, x)
            M = np.einsum("ja,bj->ab", A.rho(x), J)
            out = M - M.T - np.einsum("cab,c->ab", A.C(x), lam)
            return list(out.ravel())

        return AForm(2, SmoothMap(A.base, r * r, body, "d_A"))
    if omega.degree == 2:
        def body(x):
            w, J = value_and_jacobian(omega.coeffs, x)
            w, J = w.reshape(r, r), J.reshape(r, r, -1)
            D = np.einsum("ja,bcj->abc", A.rho(x), J)  # rho_a applied to w_bc
            B = np.einsum("dab,dc->abc", A.C(x), w)  # w([e_a, e_b], e_c)
            out = (D - D.transpose(1, 0, 2) + D.transpose(1, 2, 0)
                   - B + B.transpose(0, 2, 1) - B.transpose(2, 0, 1))
            return list(out.ravel())

        return AForm(3, SmoothMap(A.base, r ** 3, body, "d_A"))
    raise ValueError("d_A is implemented up to degree 2")


def random_form(A: LieAlgebroid, degree: int, seed: int) -> AForm:
    """Seeded form with smooth non-polynomial coefficients (quadratic plus a sine term)."""
    rng = np.random.default_rng(seed)
    n, size = A.base.dim, A.rank ** degree
    c0 = rng.normal(size=size)
    c1 = rng.normal(size=(size, n))
    c2 = rng.normal(size=(size, n, n)) * 0.5
    k = rng.normal(size=(size, n))
    amp = rng.normal(size=size) * 0.5
    rows = [(c0[s], c1[s].tolist(), c2[s].tolist(), k[s].tolist(), amp[s]) for s in range(size)]

    def body(x):
        out = []
        for a0, a1, a2, kk, am in rows:
            v = a0 + sum(a * xi for a, xi in zip(a1, x))
            v = v + sum(a2[i][j] * x[i] * x[j] for i in range(n) for j in range(n))
            out.append(v + am * dsin(sum(ki * xi for ki, xi in zip(kk, x))))
        return out

    return AForm(degree, SmoothMap(A.base, size, body, f"random{degree}[{seed}]"))


def dd_residual(A: LieAlgebroid, omega: AForm, x) -> float:
    """``max |d_A d_A omega|`` at ``x`` for omega of degree 0 or 1."""
    return _max_abs(d_A(A, d_A(A, omega))(x))


def interior(eps: ASection, omega: AForm) -> AForm:
    """Contraction with a section: iota_eps on degrees 1 and 2."""
    chart = eps.components.domain
    if omega.degree == 1:
        def body(x):
            return [np.dot(as_array(eps.components(x)), as_array(omega.coeffs(x)))]

        return AForm(0, SmoothMap(chart, 1, body, "iota"))
    if omega.degree == 2:
        r = eps.components.codim

        def body(x):
            w = as_array(omega.coeffs(x)).reshape(r, r)
            return list(np.einsum("a,ab->b", as_array(eps.components(x)), w))

        return AForm(1, SmoothMap(chart, r, body, "iota"))
    raise ValueError("interior product of a function is zero; handle degree 0 separately")


def lie_derivative(A: LieAlgebroid, eps: ASection, omega: AForm) -> AForm:
    """Cartan formula ``L_eps = iota_eps d_A + d_A iota_eps``."""
    if omega.degree == 0:
        return interior(eps, d_A(A, omega))
    if omega.degree == 1:
        first = interior(eps, d_A(A, omega))
        second = d_A(A, interior(eps, omega))

        def body(x):
            return list(as_array(first.coeffs(x)) + as_array(second.coeffs(x)))

        return AForm(1, SmoothMap(A.base, A.rank, body, "lie_derivative"))
    raise ValueError("Lie derivative implemented on degrees 0 and 1")


def anchor_compat_residual(A: LieAlgebroid, x) -> np.ndarray:
    """``R[i, a, b] = rho^i_c C^c_ab - rho^j_a d_j rho^i_b + rho^j_b d_j rho^i_a``."""
    rho, drho = A.rho_with_grad(x)
    t = np.einsum("ja,ibj->iab", rho, drho)
    return np.einsum("ic,cab->iab", rho, A.C(x)) - t + t.transpose(0, 2, 1)


def jacobi_residual(A: LieAlgebroid, x) -> np.ndarray:
    """Cyclic sum over (a, b, c) of ``C^d_ae C^e_bc + rho^j_a d_j C^d_bc``, shape ``[d, a, b, c]``."""
    C, dC = A.C_with_grad(x)
    T = np.einsum("dae,ebc->dabc", C, C) + np.einsum("ja,dbcj->dabc", A.rho(x), dC)
    return T + np.einsum("dbca->dabc", T) + np.einsum("dcab->dabc", T)


def antisymmetry_residual(A: LieAlgebroid, x) -> np.ndarray:
    C = A.C(x)
    return C + C.transpose(0, 2, 1)


def poisson_jacobiator(pi: SmoothMap, x) -> np.ndarray:
    """``J^{ijk} = pi^{lk} d_l pi^{ij} + pi^{li} d_l pi^{jk} + pi^{lj} d_l pi^{ki}``."""
    n = pi.domain.dim
    v, J = value_and_jacobian(pi, x)
    P, dP = v.reshape(n, n), J.reshape(n, n, n)
    S = np.einsum("lk,ijl->ijk", P, dP)
    return S + np.einsum("jki->ijk", S) + np.einsum("kij->ijk", S)


def _max_abs(arr) -> float:
    arr = np.asarray(arr, dtype=float)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def measure_axioms(A: LieAlgebroid, n_points: int = DEFAULT_AXIOM_POINTS, seed: int = 0,
                   points=None) -> dict:
    """Max residuals of antisymmetry, anchor compatibility and Jacobi over a seeded sample."""
    pts = sample_points(A.base, n_points, seed) if points is None else points
    out = {"antisymmetry": 0.0, "anchor_compat": 0.0, "jacobi": 0.0,
           "worst_point": {"anchor_compat": None, "jacobi": None}}
    for x in pts:
        x = tuple(float(v) for v in x)
        out["antisymmetry"] = max(out["antisymmetry"], _max_abs(antisymmetry_residual(A, x)))
        for key, fn in (("anchor_compat", anchor_compat_residual), ("jacobi", jacobi_residual)):
            val = _max_abs(fn(A, x))
            if val >= out[key]:
                out[key] = val
                out["worst_point"][key] = list(x)
    out["points"] = len(pts)
    return out


# -- constructors ----------------------------------------------------------

POINT = Chart(("o",), ((0.0, 0.0),))


def so3_structure() -> np.ndarray:
    """``C[c, a, b] = epsilon_abc``."""
    C = np.zeros((3, 3, 3))
    for a, b, c, s in ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (1, 0, 2, -1), (2, 1, 0, -1), (0, 2, 1, -1)):
        C[c, a, b] = s
    return C


def so3_generators() -> np.ndarray:
    """``L[a]`` with ``(L_a)_ij = -epsilon_aij`` so that ``L_a x = e_a x x``."""
    L = np.zeros((3, 3, 3))
    for a, i, j, s in ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (0, 2, 1, -1), (1, 0, 2, -1), (2, 1, 0, -1)):
        L[a, i, j] = -s
    return L


def structure_from_generators(gens) -> np.ndarray:
    """Solve ``[E_a, E_b] = C^c_ab E_c`` in the least-squares sense; raises if not closed."""
    gens = np.asarray(gens, dtype=float)
    r = gens.shape[0]
    basis = gens.reshape(r, -1).T
    C = np.zeros((r, r, r))
    for a in range(r):
        for b in range(r):
            comm = (gens[a] @ gens[b] - gens[b] @ gens[a]).ravel()
            coef, *_ = np.linalg.lstsq(basis, comm, rcond=None)
            if np.max(np.abs(basis @ coef - comm)) > 1e-10:
                raise ValueError("generators do not span a Lie algebra")
            C[:, a, b] = coef
    return C


def from_lie_algebra(C, base: Chart | None = None, name: str = "lie_algebra",
                     generators=None) -> LieAlgebroid:
    """A Lie algebra as an algebroid with zero anchor (over a point unless ``base`` is given)."""
    C = np.asarray(C, dtype=float)
    r = C.shape[0]
    if C.shape != (r, r, r):
        raise ValueError("structure constants must have shape (r, r, r)")
    base = base or POINT
    n = base.dim
    flatC = C.ravel().tolist()
    anchor = SmoothMap.constant(base, [0.0] * (n * r), "zero_anchor")
    structure = SmoothMap(base, r ** 3, lambda x: list(flatC), "C")
    return LieAlgebroid(base, r, anchor, structure, name,
                        None if generators is None else np.asarray(generators, float), C)


def so3(base: Chart | None = None) -> LieAlgebroid:
    return from_lie_algebra(so3_structure(), base, "so3", so3_generators())


def abelian(rank: int = 1, base: Chart | None = None) -> LieAlgebroid:
    return from_lie_algebra(np.zeros((rank, rank, rank)), base, f"abelian{rank}")


def tangent_algebroid(chart: Chart) -> LieAlgebroid:
    n = chart.dim
    eye = np.eye(n).ravel().tolist()
    anchor = SmoothMap.constant(chart, eye, "identity_anchor")
    structure = SmoothMap.constant(chart, [0.0] * n ** 3, "zero")
    return LieAlgebroid(chart, n, anchor, structure, "tangent", None, np.zeros((n, n, n)))


def action_algebroid(chart: Chart, C, vector_fields: SmoothMap, name: str = "action",
                     generators=None) -> LieAlgebroid:
    """``chart x g`` with anchor columns ``v_a`` (``vector_fields`` returns ``v[i, a]`` flattened)."""
    C = np.asarray(C, dtype=float)
    r = C.shape[0]
    if vector_fields.codim != chart.dim * r:
        raise ValueError("vector_fields must return dim * rank components")
    flatC = C.ravel().tolist()
    structure = SmoothMap(chart, r ** 3, lambda x: list(flatC), "C")
    return LieAlgebroid(chart, r, vector_fields, structure, name,
                        None if generators is None else np.asarray(generators, float), C)


def matrix_action_algebroid(chart: Chart, generators, name: str = "matrix_action") -> LieAlgebroid:
    """Right action ``x . g = g^{-1} x`` of a matrix group; ``v_a(x) = -E_a x``.

    The minus sign makes the anchor a bracket homomorphism for
    ``[E_a, E_b] = C^c_ab E_c``.
    """
    E = np.asarray(generators, dtype=float)
    r, n = E.shape[0], E.shape[1]
    if n != chart.dim:
        raise ValueError("generators must act on the base coordinates")
    rows = [[(-E[a, i]).tolist() for a in range(r)] for i in range(n)]

    def body(x):
        return [sum(c * xj for c, xj in zip(rows[i][a], x)) for i in range(n) for a in range(r)]

    v = SmoothMap(chart, n * r, body, "action_fields")
    return action_algebroid(chart, structure_from_generators(E), v, name, E)


def so3_action(box: float = 2.0) -> LieAlgebroid:
    """so(3) acting on R^3 by rotations, anchor ``v_a(x) = x cross e_a``."""
    chart = Chart.cube(("x1", "x2", "x3"), -box, box)
    return matrix_action_algebroid(chart, so3_generators(), "so3_action")


def cotangent_algebroid(pi, name: str = "cotangent") -> LieAlgebroid:
    """T*M of a bivector ``pi`` (SmoothMap returning ``pi[i, j]`` flattened).

    Anchor ``rho(dx^j) = pi^{ji} d_i`` and bracket ``[dx^i, dx^j] = d_k pi^{ij} dx^k``.
    """
    pi = getattr(pi, "pi", pi)
    chart = pi.domain
    n = chart.dim

    def anchor_body(x):
        P = pi(x)
        # rho[i, (j)] = pi^{ji}
        return [P[j * n + i] for i in range(n) for j in range(n)]

    def structure_body(x):
        _, J = value_and_jacobian(pi, x)
        J = J.reshape(n, n, n)  # d_k pi^{ij} as J[i, j, k]
        return [J[i, j, k] for k in range(n) for i in range(n) for j in range(n)]

    return LieAlgebroid(chart, n, SmoothMap(chart, n * n, anchor_body, "pi_sharp"),
                        SmoothMap(chart, n ** 3, structure_body, "dpi"), name)
