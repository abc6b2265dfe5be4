import csv

import numpy as np
import pytest

from nlgauge import algebroid as al
from nlgauge import apath
from nlgauge.psm import builtin_models
from nlgauge.smoothcalc import Chart

SO3A = al.so3_action()
AXIS1 = lambda w: (lambda t: np.outer(np.ones_like(t), [w, 0.0, 0.0]))


def gentle_curve(rank, seed):
    return apath.fourier_curve(rank, seed, modes=1, amplitude=0.5)


def test_zero_path_has_zero_residual():
    x = np.tile([0.3, -0.2, 0.1], (17, 1))
    assert apath.apath_residual(apath.APath(SO3A, x, np.zeros((17, 3)))) == 0.0


def test_tangent_path_residual_floor():
    A = al.tangent_algebroid(Chart.cube(("x1", "x2"), -3.0, 3.0))
    t = np.linspace(0.0, 1.0, 513)
    x = np.stack([np.sin(3 * t), t ** 3 - t], axis=1)
    a = np.stack([3 * np.cos(3 * t), 3 * t ** 2 - 1], axis=1)
    assert apath.apath_residual(apath.APath(A, x, a)) <= 1e-6


@pytest.mark.parametrize("seed", range(3))
def test_integrated_paths_are_flat(seed):
    p = apath.integrate_base(SO3A, gentle_curve(3, seed), [0.5, 0.2, -0.4], 512)
    assert apath.apath_residual(p) <= 1e-8


def test_zero_anchor_keeps_base_point():
    A = al.so3(Chart.cube(("y",), -1.0, 1.0))
    p = apath.integrate_base(A, apath.fourier_curve(3, 0), [0.25], 64)
    assert np.all(p.x == 0.25)


def test_constant_rotation_closed_form():
    p = apath.integrate_base(SO3A, AXIS1(np.pi), [0.0, 1.0, 0.0], 512)
    assert np.max(np.abs(p.x[-1] - [0.0, -1.0, 0.0])) <= 1e-10
    w, x0 = 1.3, np.array([0.2, 0.7, -0.4])
    q = apath.integrate_base(SO3A, AXIS1(w), x0, 256)
    c, s = np.cos(w * q.t), np.sin(w * q.t)
    # the right action turns x about e1 by -w t
    exact = np.stack([np.full_like(c, x0[0]), c * x0[1] + s * x0[2], -s * x0[1] + c * x0[2]], axis=1)
    assert np.max(np.abs(q.x - exact)) <= 1e-10


def test_casimir_is_conserved():
    A = builtin_models()["su2"].algebroid
    x0 = np.array([0.6, -0.3, 0.9])
    p = apath.integrate_base(A, gentle_curve(3, 4), x0, 512)
    assert np.max(np.abs(np.linalg.norm(p.x, axis=1) - np.linalg.norm(x0))) <= 1e-9


def test_rk_order():
    a = apath.fourier_curve(3, 1)
    x0 = [0.4, 0.1, -0.3]
    ref = apath.integrate_base(SO3A, a, x0, 4096).x[-1]
    errs = [np.max(np.abs(apath.integrate_base(SO3A, a, x0, N).x[-1] - ref)) for N in (16, 32, 64)]
    assert all(3.5 <= q <= 4.5 for q in apath.measured_order(errs))


def test_sampled_fiber_curve_is_accepted():
    t = np.linspace(0.0, 1.0, 257)
    a = gentle_curve(3, 2)
    from_callable = apath.integrate_base(SO3A, a, [0.1, 0.2, 0.3], 256)
    from_samples = apath.integrate_base(SO3A, a(t), [0.1, 0.2, 0.3], 256)
    assert np.max(np.abs(from_callable.x - from_samples.x)) <= 1e-8


def test_path_leaving_box_raises():
    with pytest.raises(apath.PathExitError):
        apath.integrate_base(al.tangent_algebroid(Chart.cube(("x1",), -1.0, 1.0)),
                             lambda t: np.full((len(t), 1), 5.0), [0.0], 16)
    with pytest.raises(apath.PathExitError):
        apath.integrate_base(SO3A, AXIS1(1.0), [3.0, 0.0, 0.0], 16)


def test_holonomy_simple_cases():
    p0 = apath.integrate_base(SO3A, lambda t: np.zeros((len(t), 3)), [0.0, 1.0, 0.0], 32)
    assert np.array_equal(apath.holonomy(SO3A, p0).R, np.eye(3))
    p = apath.integrate_base(SO3A, AXIS1(np.pi), [0.0, 1.0, 0.0], 512)
    H = apath.holonomy(SO3A, p)
    assert np.max(np.abs(H.R - np.diag([1.0, -1.0, -1.0]))) <= 1e-9
    assert H.consistency() <= 1e-8 and H.orthogonality() <= 1e-12


def test_holonomy_consistency_on_random_paths():
    for seed in range(5):
        H = apath.holonomy(SO3A, apath.random_flat_path(SO3A, seed))
        assert H.consistency() <= 1e-8


def test_concatenation_order():
    bump = lambda t: np.sin(np.pi * t)[:, None] ** 4  # smooth junction at t = 1/2
    c1, c2 = gentle_curve(3, 5), gentle_curve(3, 6)
    a1 = lambda t: bump(t) * c1(t)
    a2 = lambda t: bump(t) * c2(t)
    x0 = np.array([0.3, -0.5, 0.2])
    N = 512
    p1 = apath.integrate_base(SO3A, a1, x0, N)
    p2 = apath.integrate_base(SO3A, a2, p1.x[-1], N)

    def both(t):
        t = np.asarray(t)
        return np.where((t < 0.5)[:, None], 2 * a1(np.minimum(2 * t, 1.0)), 2 * a2(np.maximum(2 * t - 1, 0.0)))

    p = apath.integrate_base(SO3A, both, x0, 2 * N)
    R1, R2, R = (apath.holonomy(SO3A, q).R for q in (p1, p2, p))
    assert np.max(np.abs(R - R1 @ R2)) <= 1e-8
    assert np.max(np.abs(R - R2 @ R1)) > 1e-3


def test_zero_homotopy_leaves_path():
    p = apath.random_flat_path(SO3A, 3)
    q = apath.homotopy_flow(p, apath.Homotopy.zero(3))
    assert np.max(np.abs(q.a - p.a)) == 0.0
    assert np.max(np.abs(q.x - p.x)) <= 1e-14


def test_random_homotopy_vanishes_at_ends():
    hom = apath.random_homotopy(3, 7)
    assert hom.boundary_defect() <= 1e-30


def test_abelian_integral_is_invariant():
    A = al.abelian(1)
    t = np.linspace(0.0, 1.0, 257)
    p = apath.APath(A, np.zeros((257, 1)), np.cos(3 * t)[:, None] + t[:, None] ** 2)
    trap = getattr(np, "trapezoid", None) or np.trapz
    for seed in range(3):
        q = apath.homotopy_flow(p, apath.random_homotopy(1, seed))
        assert abs(trap(q.a[:, 0], t) - trap(p.a[:, 0], t)) <= 1e-12


def test_holonomy_survives_homotopies():
    p = apath.random_flat_path(SO3A, 11)
    H0 = apath.holonomy(SO3A, p)
    for seed in range(3):
        fr = apath.homotopy_flow(p, apath.random_homotopy(3, seed), track_unprojected=True)
        H1 = apath.holonomy(SO3A, fr.path)
        assert np.max(np.abs(H1.R - H0.R)) <= 1e-6
        assert np.max(np.abs(fr.path.x[-1] - p.x[-1])) <= 1e-6


def test_homotopy_rank_checked():
    with pytest.raises(ValueError):
        apath.homotopy_flow(apath.random_flat_path(SO3A, 0), apath.random_homotopy(2, 0))


def test_weinstein_zero_trials():
    rep = apath.weinstein_experiment(SO3A, trials=1, paths=1, zero=True, N=64)
    assert rep["summary"]["max_holonomy_drift"] == 0.0
    assert rep["summary"]["max_endpoint_drift"] <= 1e-14


def test_distinct_holonomies_stay_apart():
    assert apath.separation_experiment(SO3A)["min_distance"] > 0.5


def test_csv_schema(tmp_path):
    p = apath.integrate_base(SO3A, AXIS1(1.0), [0.0, 1.0, 0.0], 16)
    dest = tmp_path / "path.csv"
    apath.write_path_csv(p, dest)
    rows = list(csv.reader(open(dest, newline="")))
    assert rows[0] == ["t", "x1", "x2", "x3", "a1", "a2", "a3"]
    assert len(rows) == 1 + 17
    assert float(rows[-1][2]) == p.x[-1, 1]
    empty = tmp_path / "empty.csv"
    apath.write_path_csv(None, empty, 3, 3)
    assert empty.read_bytes() == b"t,x1,x2,x3,a1,a2,a3\r\n"


def test_path_validation():
    with pytest.raises(ValueError):
        apath.APath(SO3A, np.zeros((5, 3)), np.zeros((5, 3)))
    with pytest.raises(ValueError):
        apath.APath(SO3A, np.zeros((17, 2)), np.zeros((17, 3)))
