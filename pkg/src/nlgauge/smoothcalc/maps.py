"""Charts and smooth coordinate maps with exact first derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Real
from typing import Callable, Sequence

import numpy as np

from nlgauge.smoothcalc.dual import Dual, new_tag, tangent, value
from nlgauge.smoothcalc.expr import compile_expr, parse_expr


class NonFiniteError(ArithmeticError):
    def __init__(self, name, point, result):
        super().__init__(f"{name or 'map'} is not finite at {tuple(point)}: {result}")
        self.point = tuple(point)
        self.result = result


@dataclass(frozen=True)
class Chart:
    labels: tuple
    box: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "box", box)
        if not labels:
            raise ValueError("chart needs at least one coordinate")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate coordinate labels: {labels}")
        if len(box) != len(labels):
            raise ValueError("one interval per coordinate required")
        for lo, hi in box:
            if not lo <= hi:
                raise ValueError(f"empty interval [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.labels)

    @classmethod
    def cube(cls, labels: Sequence[str], lo: float = -1.0, hi: float = 1.0) -> "Chart":
        return cls(tuple(labels), tuple((lo, hi) for _ in labels))

    def contains(self, point, slack: float = 0.0) -> bool:
        return all(lo - slack <= float(x) <= hi + slack
                   for x, (lo, hi) in zip(point, self.box))


@dataclass(frozen=True)
class SmoothMap:
    """A map from ``domain`` to R^codim.

    ``body`` takes a tuple of scalars (floats or duals) and returns a sequence
    of ``codim`` scalars built with dual-aware arithmetic.
    """

    domain: Chart
    codim: int
    body: Callable = field(repr=False)
    name: str = ""

    def __call__(self, point):
        out = self.body(tuple(point))
        if len(out) != self.codim:
            raise ValueError(f"{self.name or 'map'} returned {len(out)} values, expected {self.codim}")
        return list(out)

    @classmethod
    def from_exprs(cls, chart: Chart, sources: Sequence[str], name: str = "") -> "SmoothMap":
        fns = [compile_expr(parse_expr(s, chart), chart.labels) for s in sources]
        return cls(chart, len(fns), lambda x: [fn(x) for fn in fns], name or ",".join(sources))

    @classmethod
    def constant(cls, chart: Chart, values: Sequence[float], name: str = "const") -> "SmoothMap":
        vals = [float(v) for v in values]
        return cls(chart, len(vals), lambda x: list(vals), name)

    @classmethod
    def identity(cls, chart: Chart) -> "SmoothMap":
        return cls(chart, chart.dim, lambda x: list(x), "id")

    @classmethod
    def linear(cls, chart: Chart, matrix) -> "SmoothMap":
        A = np.asarray(matrix, dtype=float)
        if A.shape[1] != chart.dim:
            raise ValueError("matrix columns must match chart dimension")
        rows = A.tolist()

        def body(x):
            return [sum(a * xi for a, xi in zip(row, x)) for row in rows]

        return cls(chart, A.shape[0], body, "linear")


def as_array(values) -> np.ndarray:
    """Float array when every entry is real, object array if duals remain."""
    arr = np.asarray(values, dtype=object)
    if all(isinstance(v, Real) for v in arr.flat):
        return arr.astype(float)
    return arr


def evaluate(fmap: SmoothMap, point) -> np.ndarray:
    """Evaluate at a real point; raises NonFiniteError on inf/nan output."""
    if len(point) != fmap.domain.dim:
        raise ValueError(f"point has {len(point)} coordinates, chart has {fmap.domain.dim}")
    out = as_array(fmap(point))
    if out.dtype != object and not np.all(np.isfinite(out)):
        raise NonFiniteError(fmap.name, point, out)
    return out


def value_and_jacobian(fn: Callable, point) -> tuple:
    """``(fn(point), d fn / d point)`` for a scalar-sequence function.

    Works when ``point`` itself holds duals; the result then carries those
    outer perturbations, which is how nested derivatives are taken.
    """
    point = tuple(point)
    n = len(point)
    val = None
    cols = []
    for mu in range(n):
        tag = new_tag()
        seeded = point[:mu] + (Dual(point[mu], 1.0, tag),) + point[mu + 1:]
        out = fn(seeded)
        if val is None:
            val = [value(y, tag) for y in out]
        cols.append([tangent(y, tag) for y in out])
    if val is None:
        val = list(fn(point))
    jac = [[cols[mu][i] for mu in range(n)] for i in range(len(val))]
    return as_array(val), as_array(jac).reshape(len(val), n)


def jacobian(fmap, point) -> np.ndarray:
    """Matrix ``[codim x dim]`` of exact first partials at ``point``."""
    return value_and_jacobian(fmap, point)[1]


def fd_jacobian(fmap, point, h: float = 1e-5) -> np.ndarray:
    """Central-difference jacobian; independent of the dual-number path."""
    if not h > 0:
        raise ValueError("h must be positive")
    x = np.asarray(point, dtype=float)
    cols = []
    for mu in range(x.size):
        e = np.zeros_like(x)
        e[mu] = h
        fp = np.asarray(fmap(tuple(x + e)), dtype=float)
        fm = np.asarray(fmap(tuple(x - e)), dtype=float)
        cols.append((fp - fm) / (2.0 * h))
    return np.stack(cols, axis=1) if cols else np.zeros((0, 0))


def sample_points(chart: Chart, n: int, seed: int) -> np.ndarray:
    """``n`` points drawn uniformly from the chart box, shape ``(n, dim)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in chart.box])
    hi = np.array([b[1] for b in chart.box])
    return lo + (hi - lo) * rng.random((n, chart.dim))


def is_finite(x) -> bool:
    return all(math.isfinite(float(v)) for v in np.ravel(x))
