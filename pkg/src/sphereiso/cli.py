"""Command-line harness: ``sphereiso <subcommand> [flags]``.

Each subcommand runs one module's verifier and prints a JSON report with the
fields ``check, pass, max_residual, witnesses, seed, config``. Exit status is
0 when every check passes, 1 on a failed check and 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bishop, conformal, faces, peaking, polygon, tingley
from .algebra import AnalyticFunction, FiniteFunction, write_grid_csv

MODULES = ("verify-geometry", "riemann-map", "peak", "bishop", "faces", "tingley")

DEFAULT_TOLERANCES = {
    "membership": polygon.MEMBERSHIP_TOL,
    "endpoint": 1e-6,
    "hausdorff": 1e-4,
    "peak_value": peaking.PEAK_TOL,
    "range": peaking.RANGE_TOL,
    "norm": bishop.NORM_TOL,
    "bishop_value": 1e-8,
    "distance_slack": bishop.DISTANCE_SLACK,
    "oracle": 1e-3,
    "gap": faces.GAP_LIMIT,
    "residual": tingley.RESIDUAL_TOL,
}


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        unknown = sorted(set(self.tolerances) - set(DEFAULT_TOLERANCES))
        if unknown:
            raise InputError(f"unknown tolerance name(s): {', '.join(unknown)}")

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def rng(self, module: str) -> np.random.Generator:
        # one stream per module, keyed by a fixed counter
        key = MODULES.index(module)
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(key,)))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _report(cfg: RunConfig, check: str, passed: bool, max_residual, witnesses=None, **details):
    out = {
        "check": check,
        "pass": bool(passed),
        "max_residual": float(max_residual),
        "witnesses": witnesses or [],
        "seed": cfg.seed,
        "config": {"tolerances": {k: cfg.tol(k) for k in sorted(DEFAULT_TOLERANCES)}, **cfg.options},
    }
    out.update(details)
    return _jsonable(out)


def run_geometry(cfg: RunConfig) -> dict:
    n = int(cfg.options.get("samples", 100_000))
    rng = cfg.rng("verify-geometry")
    tol = cfg.tol("membership")
    prod = polygon.verify_product_lemma(n, rng, raise_on_failure=False)
    disk = polygon.verify_hexagon_disk_bound(n, rng, raise_on_failure=False)
    prod_ok = prod["max_violation"] <= tol and prod["hull_error"] <= tol and prod["hull_vertices"] == 6
    disk_ok = disk["max_violation"] <= tol
    worst = max(prod["max_violation"], prod["hull_error"], disk["max_violation"])
    failed = [r["lemma"] for r, ok in ((prod, prod_ok), (disk, disk_ok)) if not ok]
    return _report(cfg, "verify-geometry", not failed, worst, failed, reports=[prod, disk])


def run_riemann(cfg: RunConfig) -> dict:
    nodes = int(cfg.options.get("nodes", 2048))
    order = int(cfg.options.get("order", 24))
    try:
        cmap = conformal.build_rhombus_map(order)
    except conformal.QuadratureError as exc:
        return _report(cfg, "riemann-map", False, np.inf, [str(exc)])
    rep = conformal.riemann_report(cmap, nodes)
    if cfg.options.get("csv"):
        theta, img = conformal.boundary_image(cmap, nodes)
        write_grid_csv(cfg.options["csv"], theta, img)
    ends = max(rep["f1_residual"], rep["fm1_residual"])
    failed = []
    if ends >= cfg.tol("endpoint"):
        failed.append("endpoint residual")
    if rep["hausdorff"] >= cfg.tol("hausdorff"):
        failed.append("hausdorff distance")
    return _report(
        cfg, "riemann-map", not failed, max(ends, rep["hausdorff"]), failed,
        report=rep, map=cmap.to_json(),
    )


def run_peak(cfg: RunConfig) -> dict:
    o = cfg.options
    xa = float(o.get("x", 0.0))
    half = float(o.get("arc", 0.3))
    delta = float(o.get("delta", 0.1))
    if half <= 0 or not 0 < delta < 1:
        raise InputError("--arc must be positive and --delta in (0, 1)")
    arc = peaking.Arc.around(xa, half)
    u = peaking.localized_peak(np.exp(1j * xa), arc, delta, certify=False)
    if o.get("sharpness") is not None:
        m = int(o["sharpness"])
        if m < 1:
            raise InputError("--sharpness must be >= 1")
        u = peaking.LocalizedPeak(u.x, u.arc, u.delta, m, u.pinch, theta=u.theta)
    cert = peaking.certify_peak(u)
    failed = []
    if cert.peak_value_residual > cfg.tol("peak_value"):
        failed.append("peak value")
    if not cert.off_peak_max < delta or cert.off_peak_sampled > cert.off_peak_max:
        failed.append("off-arc bound")
    if cert.range_violation > cfg.tol("range"):
        failed.append("range in R")
    worst = max(cert.peak_value_residual, cert.range_violation)
    return _report(cfg, "peak", not failed, worst, failed, function=u.to_json(), certificate=cert.to_json())


def _load_function(path) -> AnalyticFunction:
    try:
        with open(path) as fh:
            return AnalyticFunction.from_json(json.load(fh))
    except (OSError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read function from {path}: {exc}") from exc


def _bishop_failures(cfg, out, dist):
    n = out.norms
    failed = []
    if max(n["g_plus_upper"], n["g_minus_upper"]) > 1 + cfg.tol("norm"):
        failed.append("norm upper bound")
    if min(n["g_plus_lower"], n["g_minus_lower"]) < 1 - cfg.tol("norm"):
        failed.append("norm lower bound")
    if n["peak_value_residual"] > cfg.tol("bishop_value"):
        failed.append("peak values")
    if n["one_minus_2u_sampled"] > 1 + cfg.tol("norm"):
        failed.append("||1 - 2u_r||")
    if not dist["pass"]:
        failed.append("distance bounds")
    return failed


def run_bishop(cfg: RunConfig) -> dict:
    o = cfg.options
    f = _load_function(o["f"]) if o.get("f") else AnalyticFunction.identity()
    x = np.exp(1j * float(o.get("x", 0.0)))
    r = float(o.get("r", 0.9))
    try:
        out = bishop.additive_bishop(f, x, r, o.get("eps"))
    except bishop.BishopError as exc:
        return _report(cfg, "bishop", False, np.inf, [f"construction failed: {exc}"])
    dist = bishop.verify_distance_bounds(out, f)
    failed = _bishop_failures(cfg, out, dist)
    worst = max(out.norms["g_plus_upper"], out.norms["g_minus_upper"]) - 1
    return _report(cfg, "bishop", not failed, worst, failed, output=out.to_json(), distance=dist)


def run_faces(cfg: RunConfig) -> dict:
    o = cfg.options
    mode = o.get("mode", "finite")
    n = int(o.get("n", 8))
    trials = int(o.get("trials", 100))
    rng = cfg.rng("faces")
    if mode == "finite":
        maximal = faces.verify_face_maximality(n, max(trials, 1), rng)
        worst_exact = worst_oracle = 0.0
        witnesses = []
        for k in range(trials):
            f = FiniteFunction(tingley.random_sphere(rng, n, 1)[0])
            x = int(rng.integers(n))
            alpha = complex(f.values[x])
            u = bishop.unit_direction(alpha)
            prof = faces.distance_profile(f, x)
            exact = max(abs(prof.d_plus - (1 - abs(alpha))), abs(prof.d_minus - (1 + abs(alpha))))
            sampled = faces.sampled_face_distance(f, faces.MaximalFace(x, u), rng)
            gap = sampled - prof.d_plus
            worst_exact = max(worst_exact, exact)
            worst_oracle = max(worst_oracle, abs(gap))
            if exact >= cfg.tol("residual") or gap < -1e-12 or gap > cfg.tol("oracle"):
                witnesses.append({"trial": k, "x": x, "exact_residual": exact, "oracle_gap": gap})
        failed = witnesses or ([] if maximal["pass"] else ["face maximality"])
        return _report(
            cfg, "faces-finite", not failed, max(worst_exact, worst_oracle), failed,
            maximality=maximal, exact_residual=worst_exact, oracle_gap=worst_oracle,
        )
    if mode == "disk":
        rows = []
        failed = []
        for k in range(trials):
            f = bishop.random_unit_polynomial(n, rng)
            xa = float(rng.uniform(-np.pi, np.pi))
            x = np.exp(1j * xa)
            u = bishop.unit_direction(complex(f.on_circle([xa])[0]))
            for sign in (1, -1):
                lo, up = faces.face_distance_disk_bounds(f, faces.MaximalFace(x, sign * u), check_gap=False)
                rows.append({"trial": k, "sign": sign, "lower": lo, "upper": up, "gap": up - lo})
                if up - lo >= cfg.tol("gap"):
                    failed.append(rows[-1])
        worst = max((r["gap"] for r in rows), default=0.0)
        return _report(cfg, "faces-disk", not failed, worst, failed, intervals=rows)
    raise InputError(f"unknown faces mode {mode!r}")


def run_tingley(cfg: RunConfig) -> dict:
    o = cfg.options
    trials = int(o.get("trials", 1000))
    kind = o.get("oracle", "generate")
    truth = None
    if kind == "generate":
        T, truth = tingley.generate_oracle(int(o.get("n", 4)), cfg.seed)
    elif kind == "json-table":
        if not o.get("table"):
            raise InputError("--table is required with --oracle json-table")
        try:
            T = tingley.TableOracle.load(o["table"])
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"cannot read oracle table: {exc}") from exc
    else:
        raise InputError(f"unknown oracle kind {kind!r}")
    try:
        R = tingley.recover_structure(T)
    except (tingley.NotWeightedComposition, KeyError) as exc:
        return _report(cfg, "tingley", False, np.inf, [str(exc)])
    rep = tingley.verify_theorem(T, R, trials, cfg.rng("tingley"))
    failed = [k for k, c in rep["clauses"].items() if c["max_residual"] >= cfg.tol("residual")]
    roundtrip = None if truth is None else bool(R.equals(truth))
    if roundtrip is False:
        failed.append("round trip")
    return _report(
        cfg, "tingley", not failed, rep["max_residual"], failed,
        reconstruction=R.to_json(), verification=rep, round_trip=roundtrip,
    )


RUNNERS = {
    "verify-geometry": run_geometry,
    "riemann-map": run_riemann,
    "peak": run_peak,
    "bishop": run_bishop,
    "faces": run_faces,
    "tingley": run_tingley,
}


def run_all(cfg: RunConfig) -> dict:
    reports = {}
    for name, runner in RUNNERS.items():
        sub = RunConfig(name, cfg.seed, cfg.tolerances, None, {})
        if name == "verify-geometry":
            sub.options["samples"] = 20_000
        if name == "faces":
            sub.options.update(mode="finite", n=8, trials=50)
        reports[name] = runner(sub)
    failed = [k for k, r in reports.items() if not r["pass"]]
    worst = max(r["max_residual"] for r in reports.values())
    return _report(cfg, "all", not failed, worst, failed, reports=reports)


def dispatch(cfg: RunConfig) -> int:
    runner = run_all if cfg.subcommand == "all" else RUNNERS.get(cfg.subcommand)
    if runner is None:
        print(f"error: unknown subcommand {cfg.subcommand!r}", file=sys.stderr)
        return 2
    try:
        report = runner(cfg)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if not report["pass"]:
        print(f"FAILED {report['check']}: {report['witnesses']}", file=sys.stderr)
        return 1
    return 0


def _parse_tol(items):
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--tol expects name=value, got {item!r}")
        try:
            out[name] = float(value)
        except ValueError as exc:
            raise InputError(f"bad tolerance value in {item!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    common.add_argument("--output", "-o", help="write the JSON report here instead of stdout")

    p = argparse.ArgumentParser(prog="sphereiso", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("verify-geometry", parents=[common], help="rhombus/hexagon lemmas")
    g.add_argument("--samples", type=int, default=100_000)

    m = sub.add_parser("riemann-map", parents=[common], help="Schwarz-Christoffel map checks")
    m.add_argument("--nodes", type=int, default=2048)
    m.add_argument("--order", type=int, default=24)
    m.add_argument("--csv", help="write (k, theta, re, im) of the boundary image")

    k = sub.add_parser("peak", parents=[common], help="certified localized peaking function")
    k.add_argument("--x", type=float, default=0.0, help="angle of the peak point")
    k.add_argument("--arc", type=float, default=0.3, help="half-width of the arc G")
    k.add_argument("--delta", type=float, default=0.1)
    k.add_argument("--sharpness", type=int, default=None, help="override the basic-peak exponent")

    b = sub.add_parser("bishop", parents=[common], help="additive Bishop construction")
    b.add_argument("--f", help="JSON file with polynomial coefficients (default f(z) = z)")
    b.add_argument("--x", type=float, default=0.0, help="angle of the boundary point")
    b.add_argument("--r", type=float, default=0.9)
    b.add_argument("--eps", type=float, default=None)

    f = sub.add_parser("faces", parents=[common], help="face distances and maximality")
    f.add_argument("--mode", choices=["finite", "disk"], default="finite")
    f.add_argument("--n", type=int, default=8, help="dimension (finite) or degree (disk)")
    f.add_argument("--trials", type=int, default=100)

    t = sub.add_parser("tingley", parents=[common], help="isometry reconstruction")
    t.add_argument("--n", type=int, default=4)
    t.add_argument("--trials", type=int, default=1000)
    t.add_argument("--oracle", choices=["generate", "json-table"], default="generate")
    t.add_argument("--table", help="JSON file of input/output pairs for json-table mode")

    sub.add_parser("all", parents=[common], help="run every module at reduced size")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    opts = {k: v for k, v in vars(args).items() if k not in ("subcommand", "seed", "tol", "output")}
    try:
        cfg = RunConfig(args.subcommand, args.seed, _parse_tol(args.tol), args.output, opts)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return dispatch(cfg)


if __name__ == "__main__":
    sys.exit(main())
