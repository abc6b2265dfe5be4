"""Seeded gauge fields shared by the gauge, psm and acceptance tests."""

import numpy as np

from nlgauge import algebroid as al
from nlgauge import gauge
from nlgauge.psm import PSMField, as_gauge_field, builtin_models, symplectic_on_shell
from nlgauge.smoothcalc import Chart, SmoothMap

SQUARE = Chart.cube(("u1", "u2"), -1.0, 1.0)
PS = builtin_models()


def _trig(rng, scale=0.5, offset=0.0):
    a, b, c, d = (rng.normal(size=4) * scale).tolist()
    return f"{offset!r} + {a!r}*sin(u1 + {c!r}) + {b!r}*u1*u2 + {d!r}*cos(u2)"


def random_exprs(rng, k, scale=0.5):
    return [_trig(rng, scale) for _ in range(k)]


def random_rotation(seed, scale=0.8) -> gauge.GroupGauge:
    """Smooth ``R(u) = exp(eps^a(u) E_a)`` on the square."""
    rng = np.random.default_rng(seed)
    eps = SmoothMap.from_exprs(SQUARE, random_exprs(rng, 3, scale), "eps")
    return gauge.GroupGauge.exponential(eps, al.so3_generators())


def models() -> dict:
    return {
        "tangent": al.tangent_algebroid(Chart.cube(("x1", "x2"), -3.0, 3.0)),
        "so3": al.so3(),
        "so3_action": al.so3_action(),
        "sympl2": PS["sympl2"].algebroid,
        "su2": PS["su2"].algebroid,
    }


def random_field(A, seed: int) -> gauge.GaugeField:
    """Generic (non-flat) field with f kept well inside the base box."""
    rng = np.random.default_rng(seed)
    n, r = A.base.dim, A.rank
    f = [_trig(rng, 0.2) if A.base.box[i][1] > A.base.box[i][0] else "0" for i in range(n)]
    return gauge.GaugeField.from_exprs(A, SQUARE, f, random_exprs(rng, 2 * r), f"random[{seed}]")


def flat_field(name: str, A, seed: int) -> gauge.GaugeField:
    rng = np.random.default_rng(seed)
    if name == "tangent":
        a, b, c = (rng.normal(size=3) * 0.5).tolist()
        f = [f"{a!r}*sin(u1) + {b!r}*u2", f"{c!r}*u1*u2"]
        theta = [f"{a!r}*cos(u1)", f"{b!r}", f"{c!r}*u2", f"{c!r}*u1"]
        return gauge.GaugeField.from_exprs(A, SQUARE, f, theta, f"tangent_flat[{seed}]")
    if name in ("so3", "so3_action"):
        x0 = ["0"] if name == "so3" else [repr(v) for v in (rng.normal(size=3) * 0.5).tolist()]
        trivial = gauge.GaugeField.from_exprs(A, SQUARE, x0, ["0"] * 6)
        return gauge.apply_group_gauge(trivial, random_rotation(seed))
    if name == "sympl2":
        X = SmoothMap.from_exprs(SQUARE, random_exprs(rng, 2, 0.3))
        return as_gauge_field(PS["sympl2"], symplectic_on_shell(PS["sympl2"], X))
    if name == "su2":
        x0 = [repr(v) for v in (rng.normal(size=3) * 0.5).tolist()]
        phi = PSMField.from_exprs(SQUARE, x0, ["0"] * 6)
        return as_gauge_field(PS["su2"], phi)
    raise KeyError(name)


def euler_rotation(seed) -> gauge.GroupGauge:
    """``R(u) = R1(a(u)) R2(b(u)) R3(c(u))`` in closed form; cheaper to differentiate than a series."""
    from nlgauge.smoothcalc import cos, sin

    rng = np.random.default_rng(seed)
    coef = rng.normal(size=(3, 4)).tolist()

    def body(u):
        out = np.eye(3, dtype=object) * 1.0
        for axis, k in enumerate(coef):
            th = k[0] + k[1] * sin(u[0]) + k[2] * u[0] * u[1] + k[3] * cos(2 * u[1])
            c, s = cos(th), sin(th)
            b, d = (axis + 1) % 3, (axis + 2) % 3
            M = np.eye(3, dtype=object) * 1.0
            M[b, b], M[d, d], M[d, b], M[b, d] = c, c, s, -s
            out = out @ M
        return list(out.ravel())

    return gauge.GroupGauge(SmoothMap(SQUARE, 9, body, f"euler[{seed}]"), al.so3_generators())
