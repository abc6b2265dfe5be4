"""Model files and the table of numeric defaults.

A model file is TOML.  Every key is optional except ``[model].kind``;
see ``docs/model_schema.md`` for the full layout.  Expressions use the
``smoothcalc`` grammar and are parsed against the declared charts, so a bad
identifier is reported with its key path and character offset.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from dataclasses import field as dc_field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from nlgauge import algebroid as al
from nlgauge.gauge import GaugeField
from nlgauge.psm import PoissonStructure, builtin_models
from nlgauge.smoothcalc import Chart, ExprError, SmoothMap

# Every numeric default used by the CLI suites lives here.
DEFAULTS = {
    "seed": 0,
    "points": 100,                      # sample points for pointwise residuals
    "axiom_tol": 1e-9,                  # antisymmetry / anchor-compat / Jacobi
    "dd_tol": 1e-9,                     # d_A o d_A
    "flat_tol": 1e-8,                   # is_flat and morphism verdicts
    "flow_t": 1.0,
    "flow_steps": 100,
    "flow_flat_tol": 1e-7,              # flatness kept along a gauge flow
    "flow_points": 10,
    "covariance_ts": [0.2, 0.1, 0.05],
    "covariance_steps": 40,
    "covariance_points": 5,
    "ratio_band": [3.5, 4.5],
    "covariance_floor": 1e-10,          # below this r(t) is roundoff and the ratio test is skipped
    "weinstein_paths": 5,
    "weinstein_trials": 10,
    "weinstein_N": 256,
    "weinstein_s_steps": 20,
    "drift_tol": 1e-6,
    "psm_tol": 1e-12,
    "psm_onshell_tol": 1e-10,
    "random_bundles": 20,
}


class ConfigError(ValueError):
    pass


@dataclass
class ModelSpec:
    name: str
    kind: str
    A: al.LieAlgebroid
    poisson: PoissonStructure | None = None
    field: GaugeField | None = None
    eps: al.ASection | None = None
    lam: al.AForm | None = None
    h: al.AForm | None = None
    expect_flat: bool | None = None
    suites: list = dc_field(default_factory=list)
    settings: dict = dc_field(default_factory=dict)
    groupoid: str | None = None
    path: str = ""


def _chart(tbl, where: str) -> Chart:
    try:
        return Chart(tuple(tbl["labels"]), tuple(tuple(b) for b in tbl["box"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: invalid chart ({exc})") from None


def _exprs(chart: Chart, sources, where: str, name: str = "") -> SmoothMap:
    if isinstance(sources, str):
        sources = [sources]
    try:
        return SmoothMap.from_exprs(chart, [str(s) for s in sources], name)
    except ExprError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _poisson_from_table(tbl: dict, where: str) -> PoissonStructure:
    chart = _chart(tbl.get("chart", {}), f"{where}.chart")
    entries = {}
    for key, expr in tbl.get("pi", {}).items():
        try:
            i, j = (int(v) - 1 for v in key.split(","))
        except ValueError:
            raise ConfigError(f"{where}.pi: key {key!r} must look like \"i,j\"") from None
        entries[(i, j)] = str(expr)
    try:
        return PoissonStructure.from_exprs(chart, entries, tbl.get("name", "custom"),
                                           bool(tbl.get("declared_poisson", True)))
    except ExprError as exc:
        raise ConfigError(f"{where}.pi: {exc}") from None


def _algebroid(model: dict, where: str):
    kind = model.get("kind")
    poisson = None
    if kind == "cotangent":
        if "poisson" in model:
            models = builtin_models()
            if model["poisson"] not in models:
                raise ConfigError(f"{where}.poisson: unknown builtin {model['poisson']!r}")
            poisson = models[model["poisson"]]
        else:
            poisson = _poisson_from_table(model, where)
        return poisson.algebroid, poisson
    if kind == "so3":
        base = _chart(model["chart"], f"{where}.chart") if "chart" in model else None
        return al.so3(base), None
    if kind == "so3_action":
        return al.so3_action(float(model.get("box", 2.0))), None
    if kind == "abelian":
        base = _chart(model["chart"], f"{where}.chart") if "chart" in model else None
        return al.abelian(int(model.get("rank", 1)), base), None
    if kind == "tangent":
        return al.tangent_algebroid(_chart(model.get("chart", {}), f"{where}.chart")), None
    if kind == "general":
        chart = _chart(model.get("chart", {}), f"{where}.chart")
        rank = int(model.get("rank", 0))
        anchor = _exprs(chart, model.get("anchor", []), f"{where}.anchor", "anchor")
        structure = _exprs(chart, model.get("structure", []), f"{where}.structure", "structure")
        try:
            return al.LieAlgebroid(chart, rank, anchor, structure, model.get("name", "general")), None
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}.kind: expected one of cotangent, so3, so3_action, abelian, tangent, "
                      f"general; got {kind!r}")


def parse_model(data: dict, path: str = "<memory>") -> ModelSpec:
    model = data.get("model")
    if not isinstance(model, dict):
        raise ConfigError(f"{path}: missing [model] table")
    A, poisson = _algebroid(model, f"{path}: model")
    spec = ModelSpec(model.get("name", Path(path).stem), model["kind"], A, poisson, path=path)
    if "field" in data:
        fld = data["field"]
        src = _chart(fld.get("source", {}), f"{path}: field.source")
        f = _exprs(src, fld.get("f", []), f"{path}: field.f", "f")
        theta = _exprs(src, fld.get("theta", []), f"{path}: field.theta", "theta")
        try:
            spec.field = GaugeField.from_maps(A, f, theta, spec.name)
        except ValueError as exc:
            raise ConfigError(f"{path}: field: {exc}") from None
        if "expect_flat" in fld:
            spec.expect_flat = bool(fld["expect_flat"])
    if "parameter" in data:
        par = data["parameter"]
        if "eps" in par:
            spec.eps = al.ASection(_exprs(A.base, par["eps"], f"{path}: parameter.eps", "eps"))
        if "lambda" in par:
            spec.lam = al.AForm(1, _exprs(A.base, par["lambda"], f"{path}: parameter.lambda", "lambda"))
        if "h" in par:
            spec.h = al.AForm(0, _exprs(A.base, par["h"], f"{path}: parameter.h", "h"))
    if spec.eps is not None and spec.eps.components.codim != A.rank:
        raise ConfigError(f"{path}: parameter.eps needs {A.rank} components")
    if spec.lam is not None and spec.lam.coeffs.codim != A.rank:
        raise ConfigError(f"{path}: parameter.lambda needs {A.rank} components")
    spec.suites = list(data.get("suites", {}).get("run", []))
    spec.groupoid = data.get("suites", {}).get("groupoid")
    settings = dict(data.get("settings", {}))
    unknown = set(settings) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"{path}: settings: unknown keys {sorted(unknown)}")
    spec.settings = settings
    return spec


def bundled_models() -> list:
    return sorted(p.name for p in resources.files("nlgauge").joinpath("models").iterdir()
                  if p.name.endswith(".toml"))


def resolve_model_path(name: str) -> Path:
    """A filesystem path, or the name of a model bundled with the package."""
    p = Path(name)
    if p.exists():
        return p
    bundled = resources.files("nlgauge").joinpath("models").joinpath(p.name)
    if bundled.is_file():
        return Path(str(bundled))
    if not p.name.endswith(".toml"):
        return resolve_model_path(p.name + ".toml")
    raise ConfigError(f"model file {name!r} not found (bundled: {', '.join(bundled_models())})")


def load_model(name: str) -> ModelSpec:
    path = resolve_model_path(name)
    text = path.read_text()
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_model(data, str(path.name))
