"""Verification suites run by the CLI.

Each suite returns a plain dict with ``name``, ``status`` ("pass"/"fail"),
the measured numbers and, on failure, the names of the failing checks.
Wall time is added by the caller and kept out of the report proper.
"""

from __future__ import annotations

import numpy as np

from nlgauge import algebroid as al
from nlgauge import apath, gauge, groupoid_finite as gf, psm
from nlgauge.config import ModelSpec
from nlgauge.smoothcalc import Chart, SmoothMap, sample_points

SUITES = ("validate-algebroid", "check-flat", "gauge-flow", "covariance", "weinstein",
          "finite-groupoid", "psm")


def _status(failing: list) -> str:
    return "fail" if failing else "pass"


def validate_algebroid(spec: ModelSpec, cfg: dict) -> dict:
    A = spec.A
    tol = cfg["axiom_tol"]
    rep = al.measure_axioms(A, cfg["points"], cfg["seed"])
    dd = 0.0
    for k in range(3):
        for deg in (0, 1):
            form = al.random_form(A, deg, cfg["seed"] + k)
            for x in sample_points(A.base, 10, cfg["seed"] + k):
                dd = max(dd, al.dd_residual(A, form, tuple(x)))
    checks = {"antisymmetry_residual": rep["antisymmetry"], "anchor_compat_residual": rep["anchor_compat"],
              "jacobi_residual": rep["jacobi"], "dd_residual": dd}
    tols = {"antisymmetry_residual": tol, "anchor_compat_residual": tol, "jacobi_residual": tol,
            "dd_residual": cfg["dd_tol"]}
    failing = [k for k, v in checks.items() if not v <= tols[k]]
    out = {"name": "validate-algebroid", "model": spec.name, "status": _status(failing),
           "checks": checks, "tolerances": tols, "failing": failing,
           "worst_points": rep["worst_point"], "points": rep["points"]}
    if spec.poisson is not None:
        out["poisson"] = spec.poisson.measure(cfg["points"], cfg["seed"])
    return out


def check_flat(spec: ModelSpec, cfg: dict) -> dict:
    g = spec.field
    if g is None:
        return {"name": "check-flat", "model": spec.name, "status": "fail", "failing": ["no gauge field"]}
    pts = sample_points(g.source, cfg["points"], cfg["seed"])
    fl = gauge.is_flat(g, cfg["flat_tol"], pts)
    mo = gauge.morphism_residual(g, pts=pts, tol=cfg["flat_tol"])
    failing = []
    if fl.flat != mo.morphism:
        failing.append("flat_morphism_agreement")
    if spec.expect_flat is not None and fl.flat != spec.expect_flat:
        failing.append("expected_flatness")
    return {"name": "check-flat", "model": spec.name, "status": _status(failing), "failing": failing,
            "flatness": fl.as_dict(), "morphism": mo.as_dict()}


def _default_eps(A: al.LieAlgebroid) -> al.ASection:
    return al.ASection(SmoothMap.constant(A.base, np.linspace(0.3, -0.2, A.rank), "eps"))


def gauge_flow(spec: ModelSpec, cfg: dict) -> dict:
    g = spec.field
    if g is None:
        return {"name": "gauge-flow", "model": spec.name, "status": "fail", "failing": ["no gauge field"]}
    eps = spec.eps or _default_eps(spec.A)
    pts = sample_points(g.source, cfg["flow_points"], cfg["seed"])
    before = gauge.is_flat(g, cfg["flat_tol"], pts)
    gt = gauge.flow_gauge(g, gauge.GaugeParameter.pulled_back(eps), cfg["flow_t"], cfg["flow_steps"],
                          check_box=False)
    after = gauge.is_flat(gt, cfg["flow_flat_tol"], pts)
    failing = []
    if not (np.isfinite(after.max_T) and np.isfinite(after.max_F)):
        failing.append("flow_diverged")
    if before.flat and not after.flat:
        failing.append("flatness_lost")
    return {"name": "gauge-flow", "model": spec.name, "status": _status(failing), "failing": failing,
            "t": cfg["flow_t"], "steps": cfg["flow_steps"], "before": before.as_dict(), "after": after.as_dict()}


def covariance(spec: ModelSpec, cfg: dict) -> dict:
    g = spec.field
    if g is None:
        return {"name": "covariance", "model": spec.name, "status": "fail", "failing": ["no gauge field"]}
    eps = spec.eps or _default_eps(spec.A)
    lam = spec.lam or al.random_form(spec.A, 1, cfg["seed"])
    pts = sample_points(g.source, cfg["covariance_points"], cfg["seed"])
    rep = gauge.covariance_check(g, eps, lam, spec.h, cfg["covariance_ts"], cfg["covariance_steps"], pts)
    lo, hi = cfg["ratio_band"]
    at_floor = max(rep.residuals) <= cfg["covariance_floor"]
    failing = [] if at_floor else [f"ratio[{k}]" for k, q in enumerate(rep.ratios) if not lo <= q <= hi]
    anchor = max(float(np.max(np.abs(np.asarray(gauge.anchor_residual(g, tuple(u)), float)))) for u in pts)
    return {"name": "covariance", "model": spec.name, "status": _status(failing), "failing": failing,
            "ratio_band": [lo, hi], "at_roundoff": at_floor, "anchor_residual": anchor, **rep.as_dict()}


def weinstein(spec: ModelSpec | None, cfg: dict, want_paths: bool = False) -> dict:
    A = spec.A if spec is not None and apath.action_generators(spec.A) is not None else al.so3_action()
    rep = apath.weinstein_experiment(A, cfg["weinstein_trials"], cfg["seed"], cfg["weinstein_paths"],
                                     cfg["weinstein_N"], cfg["weinstein_s_steps"])
    sep = apath.separation_experiment(A, cfg["seed"])
    s = rep["summary"]
    tol = cfg["drift_tol"]
    checks = {"holonomy_drift": s["max_holonomy_drift"], "endpoint_drift": s["max_endpoint_drift"],
              "consistency": s["max_consistency"], "separation": sep["min_distance"]}
    failing = [k for k in ("holonomy_drift", "endpoint_drift") if not checks[k] <= tol]
    if not checks["consistency"] <= 1e-8:
        failing.append("consistency")
    if not checks["separation"] > 0.5:
        failing.append("separation")
    out = {"name": "weinstein", "model": A.name, "status": _status(failing), "failing": failing,
           "checks": checks, "summary": s, "records": rep["records"],
           "settings": {k: rep[k] for k in ("paths", "trials", "N", "s_steps", "seed")}}
    if want_paths:
        out["trajectories"] = [
            {"name": f"path{i}", "path": apath.random_flat_path(A, cfg["seed"] * 1000 + i, cfg["weinstein_N"])}
            for i in range(cfg["weinstein_paths"])]
    return out


GROUPOIDS = {
    "pair4": lambda: gf.pair_groupoid(4),
    "pair3": lambda: gf.pair_groupoid(3),
    "z3z3": lambda: gf.cyclic_action_groupoid(3),
    "transitive2x3": lambda: gf.transitive_groupoid(2, 3),
}


def finite_groupoid(name: str, cfg: dict) -> dict:
    """Groupoid axioms, unit-bundle principality, division identities, cocycles and random bundles."""
    names = list(GROUPOIDS) if name in (None, "all") else [name]
    unknown = [n for n in names if n not in GROUPOIDS]
    if unknown:
        return {"name": "finite-groupoid", "status": "fail", "failing": [f"unknown groupoid {unknown[0]!r}"]}
    failing, results = [], {}
    for n in names:
        G = GROUPOIDS[n]()
        U = gf.unit_bundle(G)
        fam = gf.random_section_family(U, 3, cfg["seed"])
        checks = {
            "groupoid": gf.validate_groupoid(G)["valid"],
            "action": gf.validate_action(U)["valid"],
            "principality": gf.validate_principality(U)["principal"],
            "division_identities": gf.division_identities(U)["valid"],
            "cocycle": gf.cocycle_report(U, fam)["valid"],
        }
        results[n] = {"arrows": G.n_arrows, "objects": G.n_objects, **checks}
        failing += [f"{n}.{k}" for k, ok in checks.items() if not ok]
    bundles = []
    for seed in range(cfg["random_bundles"]):
        P, sigma = gf.random_principal_bundle(cfg["seed"] * 1000 + seed)
        fam = gf.random_section_family(P, 3, seed)
        ok = (gf.validate_action(P)["valid"] and gf.validate_principality(P)["principal"]
              and gf.division_identities(P)["valid"] and gf.cocycle_report(P, fam)["valid"]
              and gf.section_isomorphism(P, sigma)["valid"])
        bundles.append({"seed": seed, "points": P.n_total, "arrows": P.G.n_arrows, "valid": ok})
        if not ok:
            failing.append(f"random_bundle[{seed}]")
    return {"name": "finite-groupoid", "status": _status(failing), "failing": failing,
            "groupoids": results, "random_bundles": bundles}


def psm_suite(spec: ModelSpec | None, cfg: dict) -> dict:
    """Two-route equations of motion on the valid built-in Poisson models, plus the symplectic on-shell field."""
    models = psm.builtin_models()
    names = [spec.poisson.name] if spec is not None and spec.poisson is not None else \
        [n for n, ps in models.items() if ps.declared_poisson]
    source = Chart.cube(("u1", "u2"), -1.0, 1.0)
    failing, results = [], {}
    for name in names:
        ps = spec.poisson if spec is not None and spec.poisson is not None else models[name]
        n = ps.chart.dim
        rng = np.random.default_rng(cfg["seed"])
        coef = (rng.normal(size=(3 * n, 3)) * 0.5).tolist()
        X = [f"{coef[i][0]!r}*sin(u1) + {coef[i][1]!r}*u1*u2 + {coef[i][2]!r}*cos(u2)" for i in range(n)]
        eta = [f"{coef[n + k][0]!r}*u1 + {coef[n + k][1]!r}*u2^2 + {coef[n + k][2]!r}*exp(u1*u2)"
               for k in range(2 * n)]
        phi = psm.PSMField.from_exprs(source, X, eta)
        agree = 0.0
        for u in sample_points(source, cfg["points"], cfg["seed"]):
            a1, a2 = psm.eom_residual(ps, phi, tuple(u))
            c1, c2 = psm.eom_components(ps, phi, tuple(u))
            agree = max(agree, float(np.max(np.abs(np.asarray(a1 - c1, float)))),
                        float(np.max(np.abs(np.asarray(a2 - c2, float)))))
        res = {"two_route_agreement": agree}
        if not agree <= cfg["psm_tol"]:
            failing.append(f"{name}.two_route_agreement")
        P0 = np.asarray(ps.matrix(tuple(0.5 * np.ones(n))), float)
        if np.linalg.matrix_rank(P0) == n:  # symplectic: eta = -pi^-1 dX solves r1 = 0
            on = psm.symplectic_on_shell(ps, SmoothMap.from_exprs(source, X))
            r1 = max(float(np.max(np.abs(np.asarray(psm.eom_residual(ps, on, tuple(u))[0], float))))
                     for u in sample_points(source, 20, cfg["seed"]))
            res["onshell_r1"] = r1
            if not r1 <= cfg["psm_onshell_tol"]:
                failing.append(f"{name}.onshell_r1")
        results[name] = res
    return {"name": "psm", "status": _status(failing), "failing": failing, "models": results}
