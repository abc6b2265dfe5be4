import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlgauge import algebroid as al
from nlgauge.gauge import expm_generic
from nlgauge.psm import builtin_models
from nlgauge.smoothcalc import Chart, SmoothMap, as_array, jacobian, sample_points

from conftest import max_abs

R2 = Chart.cube(("x1", "x2"), -1.0, 1.0)
R3 = Chart.cube(("x1", "x2", "x3"), -2.0, 2.0)
PS = builtin_models()


def valid_models():
    return {
        "tangent": al.tangent_algebroid(R2),
        "so3": al.so3(),
        "so3_line": al.so3(Chart.cube(("s",), -1.0, 1.0)),
        "so3_action": al.so3_action(),
        "sympl2": PS["sympl2"].algebroid,
        "su2": PS["su2"].algebroid,
        "quadratic": PS["quadratic"].algebroid,
    }


def mutate(A, index, factor=1.1, shift=0.0):
    """Scale ``C[c, a, b]`` and its antisymmetric partner by ``factor``, then add ``shift``."""
    c, a, b = index
    r = A.rank

    def body(x):
        C = np.array(as_array(A.structure(x)), dtype=object).reshape(r, r, r)
        C[c, a, b] = C[c, a, b] * factor + shift
        C[c, b, a] = C[c, b, a] * factor - shift
        return list(C.ravel())

    return A.with_structure(SmoothMap(A.base, r ** 3, body, "mutated"))


@pytest.mark.parametrize("name", sorted(valid_models()))
def test_axioms_hold(name):
    rep = al.measure_axioms(valid_models()[name], 100, 0)
    assert rep["antisymmetry"] <= 1e-12
    assert rep["anchor_compat"] <= 1e-9
    assert rep["jacobi"] <= 1e-9


def test_lie_algebra_residuals_are_exactly_zero():
    A = al.so3()
    assert max_abs(al.anchor_compat_residual(A, (0.0,))) == 0.0
    assert max_abs(al.jacobi_residual(A, (0.0,))) == 0.0


def test_cotangent_jacobi_tracks_jacobiator():
    """For T*M the Jacobi residual is minus the gradient of the Jacobiator."""
    ps = PS["nonpoisson"]
    A = ps.algebroid
    for x in sample_points(ps.chart, 10, 2):
        J = jacobian(lambda y: list(ps.jacobiator(y).ravel()), tuple(x)).reshape(3, 3, 3, 3)
        res = al.jacobi_residual(A, tuple(x))  # [l, i, j, k]
        assert max_abs(res + np.einsum("ijkl->lijk", J)) <= 1e-12
        anchor = al.anchor_compat_residual(A, tuple(x))  # [k, i, j]
        assert max_abs(anchor - np.einsum("ijk->kij", ps.jacobiator(tuple(x)))) <= 1e-12


def test_nonpoisson_jacobiator_value():
    J = PS["nonpoisson"].jacobiator((1.0, 0.0, 0.0))
    assert abs(J[0, 1, 2] - 1.0) <= 1e-12
    assert al.measure_axioms(PS["nonpoisson"].algebroid, 20, 0)["jacobi"] > 0.1


@given(st.tuples(*[st.floats(-2, 2)] * 3))
def test_nonpoisson_jacobiator_is_x1(x):
    assert abs(PS["nonpoisson"].jacobiator(x)[0, 1, 2] - x[0]) <= 1e-12


def test_su2_cotangent_coordinates():
    A = PS["su2"].algebroid
    eps = np.zeros((3, 3, 3))
    for i, j, k, s in ((0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1), (1, 0, 2, -1), (2, 1, 0, -1), (0, 2, 1, -1)):
        eps[i, j, k] = s
    for x in sample_points(A.base, 20, 4):
        assert np.array_equal(A.C(tuple(x)), np.einsum("ijk->kij", eps))
        assert np.allclose(A.rho(tuple(x)), np.einsum("jik,k->ij", eps, x), atol=0, rtol=0)


def test_so3_action_anchor_is_bracket_homomorphism():
    A = al.so3_action()
    for x in sample_points(A.base, 10, 1):
        rho = A.rho(tuple(x))
        for a in range(3):
            assert np.allclose(rho[:, a], np.cross(x, np.eye(3)[a]), atol=1e-15)


def test_left_rotation_fields_fail_compatibility():
    """``v_a = e_a x x`` reverses brackets, so it is not an anchor for so(3)."""
    chart = R3
    L = al.so3_generators()
    v = SmoothMap(chart, 9, lambda x: [sum(L[a, i, j] * x[j] for j in range(3))
                                       for i in range(3) for a in range(3)])
    A = al.action_algebroid(chart, al.so3_structure(), v, "left")
    assert al.measure_axioms(A, 20, 0)["anchor_compat"] > 1.0


def test_tangent_algebroid_data():
    A = al.tangent_algebroid(R2)
    assert np.array_equal(A.rho((0.2, 0.3)), np.eye(2))
    assert not np.any(A.C((0.2, 0.3)))


def test_bracket_lie_algebra_constants():
    A = al.so3()
    e1 = al.section(al.POINT, ["1", "0", "0"])
    e2 = al.section(al.POINT, ["0", "1", "0"])
    assert np.array_equal(al.bracket(A, e1, e2)((0.0,)), al.so3_structure()[:, 0, 1])


def test_bracket_of_vector_fields():
    A = al.tangent_algebroid(R2)
    e1 = al.section(R2, ["x2", "0"])
    e2 = al.section(R2, ["0", "1"])
    for x in sample_points(R2, 10, 0):
        assert np.allclose(al.bracket(A, e1, e2)(tuple(x)), [-1.0, 0.0], atol=1e-15)


@pytest.mark.parametrize("name", ["so3_action", "su2", "quadratic"])
def test_bracket_is_antisymmetric(name):
    A = valid_models()[name]
    e1 = al.ASection(al.random_form(A, 1, 3).coeffs)
    e2 = al.ASection(al.random_form(A, 1, 4).coeffs)
    for x in sample_points(A.base, 10, 0):
        assert max_abs(al.bracket(A, e1, e1)(tuple(x))) <= 1e-12
        assert max_abs(al.bracket(A, e1, e2)(tuple(x)) + al.bracket(A, e2, e1)(tuple(x))) <= 1e-12


def test_d_A_small_cases():
    A = al.so3()
    g = al.form(al.POINT, 0, ["2.5"])
    assert max_abs(al.d_A(A, g)((0.0,))) == 0.0
    lam = al.form(al.POINT, 1, ["1", "0", "0"])
    d = al.d_A(A, lam)((0.0,))
    assert d[1, 2] == -1.0
    assert np.array_equal(d, -al.so3_structure()[0])


@pytest.mark.parametrize("name", sorted(valid_models()))
@pytest.mark.parametrize("degree", [0, 1])
def test_dd_vanishes(name, degree):
    A = valid_models()[name]
    for k in range(3):
        omega = al.random_form(A, degree, 10 + k)
        for x in sample_points(A.base, 10, k):
            assert al.dd_residual(A, omega, tuple(x)) <= 1e-9


def test_dd_of_functions_on_many_points():
    for A in valid_models().values():
        g = al.random_form(A, 0, 7)
        assert max(al.dd_residual(A, g, tuple(x)) for x in sample_points(A.base, 100, 7)) <= 1e-10


def test_scaling_so3_constant_is_still_a_lie_algebra():
    # [e1, e2] = 1.1 e3 is so(3) in a rescaled basis, so scaling alone is invisible here
    A = mutate(al.so3(), (2, 0, 1))
    assert al.measure_axioms(A, 5, 0)["jacobi"] <= 1e-12


@pytest.mark.parametrize("name,index,factor,shift", [
    ("so3", (0, 0, 1), 1.0, 0.1),
    ("su2", (0, 1, 2), 1.1, 0.0),
    ("so3_action", (1, 2, 0), 1.1, 0.0),
    ("quadratic", (0, 0, 1), 1.1, 0.0),
])
def test_mutation_breaks_axioms(name, index, factor, shift):
    A = mutate(valid_models()[name], index, factor, shift)
    x = tuple(sample_points(A.base, 1, 5)[0])
    rep = al.measure_axioms(A, 20, 5)
    assert max(rep["jacobi"], rep["anchor_compat"]) > 1e-3
    dd = max(al.dd_residual(A, al.random_form(A, 1, s), x) for s in range(3))
    assert dd > 1e-3


def test_lie_derivative_matches_coadjoint_flow():
    A = al.so3()
    e1 = al.section(al.POINT, ["1", "0", "0"])
    lam = al.form(al.POINT, 1, ["0", "1", "0"])
    got = al.lie_derivative(A, e1, lam)((0.0,))
    ad = np.einsum("cab,a->cb", al.so3_structure(), [1.0, 0.0, 0.0])
    lam0 = np.array([0.0, 1.0, 0.0])
    h = 1e-5
    fd = (lam0 @ expm_generic(-h * ad) - lam0 @ expm_generic(h * ad)) / (2 * h)
    assert np.allclose(got, fd, atol=1e-9)
    assert np.allclose(got, -al.so3_structure()[1, 0, :], atol=1e-15)


def test_lie_derivative_simple_cases():
    A = al.tangent_algebroid(R2)
    e = al.section(R2, ["1", "0"])
    assert abs(al.lie_derivative(A, e, al.form(R2, 0, ["x1"]))((0.3, 0.1)) - 1.0) <= 1e-15
    zero = al.section(R2, ["0", "0"])
    lam = al.random_form(A, 1, 0)
    assert max_abs(al.lie_derivative(A, zero, lam)((0.3, 0.1))) == 0.0


def test_shape_errors():
    with pytest.raises(ValueError):
        al.LieAlgebroid(R2, 2, SmoothMap.constant(R2, [0.0] * 3), SmoothMap.constant(R2, [0.0] * 8))
    with pytest.raises(ValueError):
        al.AForm(4, SmoothMap.constant(R2, [0.0]))
    with pytest.raises(ValueError):
        al.structure_from_generators([np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]])])
