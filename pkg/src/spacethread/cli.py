"""Command-line interface.

Commands: ``analyze``, ``verify``, ``geodesic``, ``focusing``, ``catalog``.
Exit codes: 0 success, 1 a verification failed, 2 bad configuration (or a
focusing scenario with non-negative initial expansion), 3 the point or
path left the metric's domain.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import catalog as cat
from . import geodesics as geo
from . import raychaudhuri as ray
from .connection import curvature
from .errors import (DomainError, EvalError, HypothesisViolated, MissingParam, NoBlowup,
                     ParseError, SingularMetric, StepFailure, UnknownMetric)
from .frame import ThreadingGeometry
from .metric import MODES, MetricSpec, eval_sample, load_spec, spec_to_dict
from .verify import verify_metric

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3

COORDS_HELP = ("Coordinates are (x0, x1, x2, x3); for the black-hole metrics these are "
               "(t, r, theta, phi) with angles in radians.")

INDEX_ORDER = ("Arrays are row-major with spatial indices 1..3 stored at positions 0..2. "
               "Index order follows the field name: r_ssss[i][j][k][h] = R_ijkh, "
               "r_s0ss[i][k][h] = R_i0kh, r_s0s0[i][k] = R_i0k0 (symmetrized), "
               "r_star[i][j][k][h] = R*_ijkh, omega[i][j] = omega_ij, "
               "omega_mixed[j][k] = omega_j^k.")


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# deterministic JSON


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == 0.0:
        return "0.0"
    t = format(x, ".17g")
    return t if any(ch in t for ch in ".en") else t + ".0"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with sorted keys and every float at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}"
                 for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    return json.dumps(str(obj))


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


# ---------------------------------------------------------------------------
# configuration


def _parse_vector(text: str, n: int, what: str) -> np.ndarray:
    try:
        v = [float(t) for t in text.replace(" ", "").split(",")]
    except ValueError as exc:
        raise ConfigError(f"{what}: expected {n} comma-separated numbers, got {text!r}") from exc
    if len(v) != n:
        raise ConfigError(f"{what}: expected {n} numbers, got {len(v)}")
    return np.array(v)


def _parse_box(text: str) -> list:
    box = []
    for part in text.split(","):
        try:
            lo, hi = (float(t) for t in part.split(":"))
        except ValueError as exc:
            raise ConfigError(f"--box: expected lo:hi for each coordinate, got {part!r}") from exc
        box.append((lo, hi))
    if len(box) != 4:
        raise ConfigError("--box needs four lo:hi ranges")
    return box


def _catalog_params(args) -> dict:
    params = {}
    for key in ("m", "a", "e", "k"):
        v = getattr(args, key, None)
        if v is not None:
            params[key] = v
    if getattr(args, "scale", None) is not None:
        params["scale"] = args.scale
    return params


def resolve_metric(args) -> tuple[MetricSpec, dict]:
    """The metric named on the command line, and the catalog parameters used."""
    if args.spec_file:
        return load_spec(args.spec_file), {}
    if not args.metric:
        raise ConfigError("give --metric NAME or --spec-file PATH")
    params = _catalog_params(args)
    return cat.catalog_lookup(args.metric, **params), params


def resolve_points(args, spec: MetricSpec, params: dict, default_samples: int) -> np.ndarray:
    """Explicit ``--point`` values, else ``--samples`` seeded random points."""
    if args.point:
        return np.array([_parse_vector(p, 4, "--point") for p in args.point])
    n = args.samples if args.samples is not None else default_samples
    if args.box:
        box = _parse_box(args.box)
    elif args.spec_file is None:
        box = cat.sample_box(args.metric, **params)
    else:
        raise ConfigError("random sampling of a spec file needs --box")
    return cat.sample_points(spec, box, n, seed=args.seed)


# ---------------------------------------------------------------------------
# commands


def _point_record(spec: MetricSpec, point, mode: str) -> dict:
    sample = eval_sample(spec, point, mode=mode, order=2)
    g = ThreadingGeometry(sample)
    cv = curvature(sample)
    kin = {
        "phi_sq": float(g.phi2.v), "h_lo": g.h.v, "h_up": g.hinv.v,
        "omega": g.omega.v, "theta_lo": g.theta.v, "theta_scalar": float(g.theta_scalar.v),
        "sigma": g.sigma.v, "a_co": g.a.v, "c_co": g.c.v, "b_co": g.b.v,
        "omega_mixed": g.omega_mixed.v,
        "omega_sq": cv.omega_sq, "sigma_sq": cv.sigma_sq, "b_sq": cv.b_sq,
    }
    rep = ray.raychaudhuri_residual(sample, source="threading")
    return {
        "point": [float(v) for v in point],
        "kinematics": kin,
        "connection": {"gamma_space": g.gamma.v, "gamma_time": g.gamma0.v},
        "curvature": cv.bundle().to_dict(),
        "raychaudhuri": {k: v for k, v in rep.to_dict().items() if v is not None},
    }


_CSV_SCALARS = ["phi_sq", "theta_scalar", "omega_sq", "sigma_sq", "b_sq"]


def _analyze_csv(records: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    head = ["x0", "x1", "x2", "x3"] + _CSV_SCALARS
    head += [f"b{i}" for i in (1, 2, 3)]
    head += [f"omega{i}{j}" for i, j in ((1, 2), (1, 3), (2, 3))]
    head += ["ricci_00", "scalar_r", "scalar_r_star"]
    head += [f"ricci_{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3) if j >= i]
    w.writerow(head)
    for r in records:
        k, c = r["kinematics"], r["curvature"]
        ric = np.asarray(c["ricci_ss"])
        om = np.asarray(k["omega"])
        row = list(r["point"]) + [k[s] for s in _CSV_SCALARS] + list(k["b_co"])
        row += [om[0, 1], om[0, 2], om[1, 2]]
        row += [c["ricci_00"], c["scalar_r"], c["scalar_r_star"]]
        row += [ric[i, j] for i in range(3) for j in range(3) if j >= i]
        w.writerow([_fmt_float(float(v)) for v in row])
    return buf.getvalue()


def cmd_analyze(args) -> int:
    spec, params = resolve_metric(args)
    points = resolve_points(args, spec, params, default_samples=1)
    records = [_point_record(spec, p, args.deriv_mode) for p in points]
    if args.format == "csv":
        _emit(_analyze_csv(records), args.out)
    else:
        doc = {"metric": spec.name, "params": dict(spec.params), "deriv_mode": args.deriv_mode,
               "seed": args.seed, "index_order": INDEX_ORDER, "points": records}
        _emit(dumps(doc), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec, params = resolve_metric(args)
    points = resolve_points(args, spec, params, default_samples=20)
    vacuum = True if args.vacuum else None
    report = verify_metric(spec, points, mode=args.deriv_mode, vacuum=vacuum)
    if args.format == "json":
        _emit(dumps(report.to_dict()), args.out)
        if args.out not in (None, "-"):
            print(report.table())
    else:
        _emit(report.table(), args.out)
    return EXIT_OK if report.passed else EXIT_FAIL


def _load_init(args) -> dict:
    init = {}
    if args.init_file:
        try:
            init = json.loads(Path(args.init_file).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read init file: {exc}") from exc
    if args.x:
        init["x"] = list(_parse_vector(args.x, 4, "--x"))
    if args.dx:
        init["dx"] = list(_parse_vector(args.dx, 4, "--dx"))
    if args.v:
        init["v"] = list(_parse_vector(args.v, 3, "--v"))
    if args.K is not None:
        init["K"] = args.K
    if args.normalize:
        init["normalize"] = True
    if "x" not in init:
        raise ConfigError("initial position missing (init file 'x' or --x)")
    if "dx" not in init and ("v" not in init or "K" not in init):
        raise ConfigError("give a 4-velocity 'dx', or a spatial velocity 'v' together with 'K'")
    return init


def cmd_geodesic(args) -> int:
    spec, _ = resolve_metric(args)
    init = _load_init(args)
    try:
        state = geo.initial_state(spec, init["x"], dx=init.get("dx"), v=init.get("v"),
                                  K=init.get("K"), normalize=bool(init.get("normalize", False)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lam_end = args.lambda_end if args.lambda_end is not None else float(init.get("lambda_end", 10.0))
    tol = args.tol if args.tol is not None else float(init.get("tol", 1e-10))
    traj = geo.integrate(spec, state, lam_end, tol=tol, mode=args.deriv_mode)

    extra = {"tol": tol, "lambda_target": lam_end, "init": init}
    if spec.stationary and not traj.spatial:
        extra["force_identity_max_residual"] = geo.force_identity_residual(spec, traj)
    summary = traj.summary()
    summary.update(extra)
    with_force = args.with_force and spec.stationary and not traj.spatial

    if args.format == "json":
        summary["trajectory"] = [dict(zip(geo.CSV_COLUMNS, row))
                                 for row in geo.trajectory_rows(traj)]
        _emit(dumps(summary), args.out)
    else:
        _emit(geo.trajectory_csv(traj, with_force=with_force), args.out)
        if args.out in (None, "-"):
            if args.summary:
                Path(args.summary).write_text(dumps(summary) + "\n")
        else:
            path = args.summary or str(Path(args.out).with_suffix(".summary.json"))
            Path(path).write_text(dumps(summary) + "\n")
    if traj.status == "boundary":
        print(f"boundary hit at lambda = {traj.lam[-1]:.17g}, "
              f"x = {[float(v) for v in traj.boundary_point]}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def _scenario(args) -> ray.FocusingScenario:
    if args.scenario:
        try:
            data = json.loads(Path(args.scenario).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scenario file: {exc}") from exc
    else:
        if args.theta0 is None:
            raise ConfigError("give --scenario FILE or --theta0")
        data = {"theta0": args.theta0, "tau_max": args.tau_max,
                "profiles": {"ric00": args.ric00, "r": args.r, "r_star": args.r_star}}
    if "theta0" not in data:
        raise ConfigError("scenario needs theta0")
    return ray.FocusingScenario.from_dict(data)


def cmd_focusing(args) -> int:
    sc = _scenario(args)
    flags = sc.flags(0.0)
    out = {"theta0": sc.theta0, "tau_max": sc.tau_max, "flags_at_start": flags}
    try:
        iv = ray.focusing_classify(sc.theta0, **flags)
        out["interval"] = {"case": iv.case, "lo": iv.lo, "hi": iv.hi, "hi_closed": iv.hi_closed}
        line = f"case {iv.case}: focal point in {iv}"
    except HypothesisViolated as exc:
        out["interval"] = None
        line = f"no interval: {exc}"
    if not args.no_integrate:
        try:
            res = ray.focusing_evolve(sc, samples=args.samples or 200)
            out.update(res.summary())
            out["tau"] = res.tau
            out["theta"] = res.theta
            line += f"; measured blow-up at tau = {res.blowup_tau:.12g}"
        except NoBlowup as exc:
            out["blowup_tau"] = None
            line += f"; {exc}"
    json_to_stdout = args.format == "json" and args.out in (None, "-")
    print(line, file=sys.stderr if json_to_stdout else sys.stdout)
    if args.out is not None or args.format == "json":
        _emit(dumps(out), args.out)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.metric:
        spec, _ = resolve_metric(args)
        _emit(json.dumps(spec_to_dict(spec), indent=2), args.out)
        return EXIT_OK
    rows = []
    for name, entry in cat.CATALOG.items():
        need = ", ".join(entry.required) or "-"
        opt = ", ".join(f"{k}={v}" for k, v in entry.defaults.items())
        params = need + (f" ({opt})" if opt else "")
        rows.append(f"{name:20s} {params:20s} {entry.summary}")
    _emit("\n".join(rows), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("metric and sampling")
    g.add_argument("--metric", help=f"catalog name: {', '.join(cat.CATALOG)}")
    g.add_argument("--spec-file", help="metric spec JSON file (instead of --metric)")
    for k, what in (("m", "mass"), ("a", "spin"), ("e", "charge"), ("k", "FLRW spatial curvature")):
        g.add_argument(f"--{k}", type=float, help=what)
    g.add_argument("--scale", help="FLRW scale factor as an s-expression in x0, e.g. '(exp x0)'")
    g.add_argument("--point", action="append",
                   help="x0,x1,x2,x3 (repeatable; write --point=-1,... for a leading minus)")
    g.add_argument("--samples", type=int, help="number of seeded random points")
    g.add_argument("--box", help="sampling box lo:hi,lo:hi,lo:hi,lo:hi")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--deriv-mode", choices=MODES, default="analytic")
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--format", choices=("json", "csv"), default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spacethread",
        description="Threading decomposition of spacetimes: kinematics, curvature, "
                    "identities and geodesics. " + COORDS_HELP)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()

    p = sub.add_parser("analyze", parents=[common], help="kinematics and curvature at points",
                       description=COORDS_HELP + " " + INDEX_ORDER)
    p.set_defaults(func=cmd_analyze, fmt_default="json")

    p = sub.add_parser("verify", parents=[common], help="run the identity suite",
                       description=COORDS_HELP)
    p.add_argument("--vacuum", action="store_true", help="also require vanishing Ricci")
    p.set_defaults(func=cmd_verify, fmt_default="table")

    p = sub.add_parser("geodesic", parents=[common], help="integrate a timelike geodesic",
                       description=COORDS_HELP + " The init file is JSON with 'x' and either "
                       "'dx' (4-velocity) or 'v' (spatial velocity) and 'K'; optional "
                       "'normalize', 'lambda_end', 'tol'.")
    p.add_argument("--init-file")
    p.add_argument("--x", help="initial position x0,x1,x2,x3")
    p.add_argument("--dx", help="initial coordinate velocity")
    p.add_argument("--v", help="initial spatial velocity (with --K)")
    p.add_argument("--K", type=float, help="K = phi^2 dx0/dlambda along the threading")
    p.add_argument("--normalize", action="store_true", help="rescale to unit timelike velocity")
    p.add_argument("--lambda-end", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--with-force", action="store_true", help="add 3D force columns to the CSV")
    p.add_argument("--summary", help="summary JSON path (default: next to --out)")
    p.set_defaults(func=cmd_geodesic, fmt_default="csv")

    p = sub.add_parser("focusing", parents=[common], help="focal-time interval and blow-up",
                       description="Scenario JSON: {theta0, profiles: {ric00, r, r_star}, "
                       "tau_max}; profiles are numbers or s-expressions in tau.")
    p.add_argument("--scenario")
    p.add_argument("--theta0", type=float)
    p.add_argument("--ric00", default="0", help="Ric(xi, xi) profile")
    p.add_argument("--r", default="0", help="scalar curvature profile")
    p.add_argument("--r-star", default="0", help="spatial scalar curvature profile")
    p.add_argument("--tau-max", type=float, default=10.0)
    p.add_argument("--no-integrate", action="store_true")
    p.set_defaults(func=cmd_focusing, fmt_default=None)

    p = sub.add_parser("catalog", parents=[common], help="list metrics, or dump one as JSON")
    p.set_defaults(func=cmd_catalog, fmt_default=None)
    return parser


def _number_profiles(args) -> None:
    for key in ("ric00", "r", "r_star"):
        v = getattr(args, key, None)
        if isinstance(v, str):
            try:
                setattr(args, key, float(v))
            except ValueError:
                pass


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    if args.format is None:
        args.format = args.fmt_default
    if args.command == "focusing":
        _number_profiles(args)
    try:
        return args.func(args)
    except HypothesisViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, SingularMetric, EvalError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except StepFailure as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConfigError, UnknownMetric, MissingParam, ParseError, OSError, ValueError,
            KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
