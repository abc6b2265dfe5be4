"""Command-line front end: ``nlgauge <suite> [--model PATH] [flags]``.

Exit status is 0 when every selected suite passes, 1 when one fails and 2 on
a usage or configuration error.  The JSON report is deterministic for a
fixed configuration and seed; wall times go to ``timing.json`` beside it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from nlgauge import __version__, apath, kernels, suites
from nlgauge.config import DEFAULTS, ConfigError, ModelSpec, load_model

DEFAULT_MODEL = "default.toml"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_plotdata(report: dict, out_dir) -> list:
    """One CSV per trajectory (``t, x1.., a1..``); a header-only file when there are none."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trajectories = [t for s in report.get("suites", []) for t in s.get("trajectories", [])]
    written = []
    if not trajectories:
        dest = out_dir / "trajectory.csv"
        apath.write_path_csv(None, dest, report.get("plot_dims", [0, 0])[0], report.get("plot_dims", [0, 0])[1])
        return [dest]
    for tr in trajectories:
        dest = out_dir / f"{tr['name']}.csv"
        apath.write_path_csv(tr["path"], dest)
        written.append(dest)
    return written


def _strip(report: dict) -> dict:
    """Copy without in-memory trajectory objects."""
    out = dict(report)
    out["suites"] = [{k: v for k, v in s.items() if k != "trajectories"} for s in report["suites"]]
    return out


def report_json(report: dict) -> str:
    return json.dumps(_strip(report), indent=2, sort_keys=True, allow_nan=True) + "\n"


def _settings(spec: ModelSpec | None, args) -> dict:
    cfg = dict(DEFAULTS)
    if spec is not None:
        cfg.update(spec.settings)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.points is not None:
        cfg["points"] = args.points
    if args.tol is not None:
        for key in ("axiom_tol", "dd_tol", "flat_tol"):
            cfg[key] = args.tol
    return cfg


def run_suites(command: str, spec: ModelSpec | None, cfg: dict, builtin: str | None,
               want_paths: bool = False) -> dict:
    if command == "all":
        selected = list(spec.suites) if spec is not None and spec.suites else list(suites.SUITES)
    else:
        selected = [command]
    results, timing = [], {}
    for name in selected:
        t0 = time.perf_counter()
        if name == "finite-groupoid":
            res = suites.finite_groupoid(builtin or (spec.groupoid if spec else None) or "all", cfg)
        elif name == "weinstein":
            res = suites.weinstein(spec, cfg, want_paths)
        elif name == "psm":
            res = suites.psm_suite(spec if spec is not None and spec.poisson is not None
                                   and command != "all" else None, cfg)
        elif spec is None:
            res = {"name": name, "status": "fail", "failing": ["no model given"]}
        else:
            fn = {"validate-algebroid": suites.validate_algebroid, "check-flat": suites.check_flat,
                  "gauge-flow": suites.gauge_flow, "covariance": suites.covariance}.get(name)
            if fn is None:
                raise ConfigError(f"unknown suite {name!r}")
            res = fn(spec, cfg)
        timing[name] = time.perf_counter() - t0
        results.append(res)
    status = "pass" if all(r["status"] == "pass" for r in results) else "fail"
    report = {"tool": "nlgauge", "version": __version__, "backend": kernels.BACKEND, "command": command,
              "model": spec.name if spec else None, "settings": cfg, "status": status, "suites": results}
    return report, timing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlgauge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"nlgauge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in suites.SUITES + ("all",):
        sp = sub.add_parser(name)
        sp.add_argument("--model", help="model file, or the name of a bundled model")
        sp.add_argument("--builtin", help="built-in finite groupoid (pair4, pair3, z3z3, transitive2x3, all)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--tol", type=float, help="override the axiom/flatness tolerances")
        sp.add_argument("--points", type=int)
        sp.add_argument("--out", default="nlgauge-out", help="output directory")
        sp.add_argument("--format", choices=("json", "csv"), default="json",
                        help="csv also writes trajectory files for plotting")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    needs_model = args.command not in ("finite-groupoid", "weinstein", "psm")
    try:
        model = args.model or (DEFAULT_MODEL if needs_model or args.command == "all" else None)
        spec = load_model(model) if model else None
        cfg = _settings(spec, args)
        report, timing = run_suites(args.command, spec, cfg, args.builtin, args.format == "csv")
    except ConfigError as exc:
        print(f"nlgauge: config error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    _atomic_write(out / "report.json", report_json(report))
    _atomic_write(out / "timing.json", json.dumps(timing, indent=2, sort_keys=True) + "\n")
    if args.format == "csv":
        emit_plotdata(report, out)
    for s in report["suites"]:
        extra = f"  failing: {', '.join(s['failing'])}" if s.get("failing") else ""
        print(f"{s['name']:<20} {s['status']}{extra}")
    print(f"report: {out / 'report.json'}")
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
