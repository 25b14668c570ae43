"""Command-line orchestration: every pipeline behind one verb, CSV outputs
stamped with the manifest hash for reproducibility.

Exit codes: 0 success, 2 config/usage error, 3 numerical failure,
4 self-check failure in verification verbs.
"""

import argparse
import csv
import hashlib
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import certificate, duhamel, freewave, lifespan
from .config import ConfigError, load_config
from .quadrature import QuadratureError, QuadSpec
from .simulator import check_support, run

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_SELFCHECK = 4


def _manifest_hash(verb, args, config_text=""):
    items = sorted((k, repr(v)) for k, v in vars(args).items() if k != "func")
    payload = verb + "|" + "|".join(f"{k}={v}" for k, v in items) + "|" + config_text
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def _out_dir(args):
    d = Path(args.out_dir or os.environ.get("WAVEBLOWUP_OUT", "out"))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write_csv(path, header, rows, manifest):
    with open(path, "w", newline="") as fh:
        fh.write(f"# manifest_hash={manifest}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])


def _fmt(x):
    return f"{x:.12g}"


def cmd_a_eps(args):
    a = lifespan.solve_a(args.eps, args.tol)
    resid = a * a * args.eps**2 * math.log1p(a) - 1.0
    print(f"a({_fmt(args.eps)}) = {_fmt(a)}  residual = {resid:.3e}")
    return 0


def cmd_certify(args):
    consts = certificate.build_constants(args.B, args.M, args.eps, k=args.k)
    manifest = _manifest_hash("certify", args)
    rows = [
        ("D", consts.D, "dimensionless"),
        ("E", consts.E, "dimensionless"),
        ("S", consts.S, "dimensionless"),
        ("B", consts.B, "dimensionless"),
        ("M", consts.M, "length"),
        ("C1", consts.C1, "dimensionless"),
        ("B1", consts.B1, "per_length^2"),
        ("B2", consts.B2, "dimensionless"),
        ("eps0", consts.eps0, "dimensionless"),
    ]
    if args.eps <= consts.eps0:
        t_upper = certificate.lifespan_upper(args.eps, consts)
        rows.append(("T_upper", t_upper, "time"))
    out = _out_dir(args) / "certificate.csv"
    _write_csv(out, ["constant", "value", "unit"], rows, manifest)
    for name, value, unit in rows:
        print(f"{name:8s} {_fmt(value)}  [{unit}]")
    print(f"wrote {out}")
    return 0


def cmd_linear_check(args):
    cfg = load_config(args.config)
    manifest = _manifest_hash("linear-check", args, Path(args.config).read_text())
    data = cfg.data
    k = data.k
    spec = QuadSpec(rel_tol=args.quad_tol, abs_tol=1e-14, max_subdivisions=4000)

    betas = np.geomspace(0.1 * k, 40.0 * k, args.grid)
    samples = []
    for beta in betas:
        for r in np.geomspace(max(beta, 0.05 * k), 160.0 * k, args.grid):
            samples.append((float(r), float(r + beta)))
    fit = freewave.fit_linear_constants(data, samples, spec)
    print(
        f"D1 = {_fmt(fit.D1)} (sigma {fit.d1_sigma:.2e})  D2 = {_fmt(fit.D2)}  "
        f"max_violation = {fit.max_violation:.3e}  samples = {fit.sample_count}"
    )
    rows = [
        ("D1", fit.D1),
        ("D2", fit.D2),
        ("max_violation", fit.max_violation),
        ("sample_count", float(fit.sample_count)),
    ]
    ok = fit.max_violation <= 0
    if data.moment > 0:
        b, m = freewave.find_lowerbound_constants(
            data, spec=spec, n_beta=args.grid, n_r=args.grid
        )
        print(f"B = {_fmt(b)}  M = {_fmt(m)}")
        rows += [("B", b), ("M", m)]
        ok = ok and b > 0
    out = _out_dir(args) / "linear_check.csv"
    _write_csv(out, ["constant", "value"], rows, manifest)
    print(f"wrote {out}")
    return 0 if ok else EXIT_SELFCHECK


def cmd_induction_check(args):
    manifest = _manifest_hash("induction-check", args)
    c1 = certificate.seed_amplitude(args.B, args.eps)
    rng = np.random.default_rng(0)
    rows = []
    ok = True
    for j in range(1, args.j_max + 1):
        beta_min = certificate.slicer(j + 1) * args.M
        betas = beta_min * (1.2 + 3.0 * rng.random(args.samples))
        rs = betas * (1.5 + 4.0 * rng.random(args.samples))
        samples = [(float(r), float(r + b)) for r, b in zip(rs, betas)]
        report = duhamel.verify_induction_step(j, args.M, c1, samples)
        ok = ok and report.min_slack >= 1.0 - args.tol
        print(f"j = {j}: min slack ratio = {report.min_slack:.6f}")
        for (r, t), lhs, rhs, slack in zip(
            report.samples, report.lhs, report.rhs, report.slack
        ):
            rows.append((j, r, t, lhs, rhs, slack))
    out = _out_dir(args) / "induction_check.csv"
    _write_csv(
        out,
        ["j", "r_length", "t_time", "frame_rhs", "next_bound", "slack_ratio"],
        rows,
        manifest,
    )
    print(f"wrote {out}")
    return 0 if ok else EXIT_SELFCHECK


def cmd_agemi_check(args):
    cfg = load_config(args.config)
    manifest = _manifest_hash("agemi-check", args, Path(args.config).read_text())
    eps = args.eps if args.eps is not None else cfg.eps
    if eps is None:
        raise ConfigError("agemi-check needs eps (flag or config)")
    res = run(cfg.data, eps, cfg.sim, snap_every=cfg.snapshot_stride)
    k = cfg.data.k
    t_hi = res.times[-1]
    samples = []
    for beta in np.linspace(1.1 * k, 0.45 * t_hi, 4):
        for r in np.linspace(beta, 0.5 * (t_hi - beta), 3):
            if k <= (r + beta) - r <= r and r + beta <= t_hi:
                samples.append((float(r), float(r + beta)))
    violations = duhamel.check_agemi_on_solution(
        res.grid, cfg.data, eps, samples, QuadSpec(rel_tol=1e-6, abs_tol=1e-10)
    )
    rows = [(v.r, v.t, v.lhs, v.rhs, v.deficit) for v in violations]
    out = _out_dir(args) / "agemi_check.csv"
    _write_csv(out, ["r_length", "t_time", "lhs", "rhs", "deficit"], rows, manifest)
    print(f"{len(samples)} samples, {len(violations)} violations; wrote {out}")
    return 0 if not violations else EXIT_SELFCHECK


def cmd_simulate(args):
    cfg = load_config(args.config)
    manifest = _manifest_hash("simulate", args, Path(args.config).read_text())
    eps = args.eps if args.eps is not None else cfg.eps
    if eps is None:
        raise ConfigError("simulate needs eps (flag or config)")
    res = run(cfg.data, eps, cfg.sim, snap_every=cfg.snapshot_stride)
    cone_ok = check_support(res.grid, cfg.data.k)
    if res.blew_up:
        from .simulator import detect_blowup

        est = detect_blowup(res.times, res.amps, cfg.sim.blowup_threshold)
        print(
            f"blow-up: T_num = {_fmt(est.t)} "
            f"({'refined' if est.refined else 'unrefined'}), cone check {cone_ok}"
        )
    else:
        print(f"no blow-up before t_max = {cfg.sim.t_max}, cone check {cone_ok}")
    grid = res.grid
    rows = []
    for n in range(grid.values.shape[0]):
        t = n * grid.dt
        for i in range(0, grid.values.shape[1], max(args.stride, 1)):
            rows.append((i * grid.dr, t, grid.values[n, i]))
    out = _out_dir(args) / "field.csv"
    _write_csv(out, ["r_length", "t_time", "u"], rows, manifest)
    print(f"wrote {out}")
    return 0


def cmd_sweep(args):
    cfg = load_config(args.config)
    manifest = _manifest_hash("sweep", args, Path(args.config).read_text())
    if not cfg.eps_list:
        raise ConfigError("sweep needs eps_list in the config")
    records = lifespan.sweep(cfg.data, cfg.eps_list, cfg.sim, cfg.agreement_tol)
    rows = [
        (r.eps, r.T_num, r.h_used, r.grid_agreement, int(r.refined), int(r.support_ok))
        for r in records
    ]
    out = _out_dir(args) / "sweep.csv"
    _write_csv(
        out,
        ["eps", "T_num_time", "h_length", "grid_agreement", "refined", "support_ok"],
        rows,
        manifest,
    )
    for r in records:
        print(f"eps = {_fmt(r.eps)}  T_num = {_fmt(r.T_num)}  gap = {r.grid_agreement:.3%}")
    print(f"wrote {out}")
    _write_plot_script(_out_dir(args), cfg.data.moment == 0.0)
    return 0


def cmd_fit(args):
    manifest = _manifest_hash("fit", args)
    records = []
    with open(args.records) as fh:
        for row in csv.reader(line for line in fh if not line.startswith("#")):
            if row[0] == "eps":
                continue
            records.append(
                lifespan.LifespanRecord(
                    eps=float(row[0]),
                    T_num=float(row[1]),
                    h_used=float(row[2]),
                    grid_agreement=float(row[3]),
                    refined=bool(int(row[4])),
                    support_ok=bool(int(row[5])),
                )
            )
    if args.model == "a_eps":
        model = lifespan.ScalingModel(kind="a_eps")
    elif args.model.startswith("power:"):
        model = lifespan.ScalingModel(kind="power", exponent=float(args.model[6:]))
    else:
        raise ConfigError(f"unknown model {args.model!r}")
    fit = lifespan.fit_scaling(records, model)
    print(
        f"model {model.describe()}: prefactor = {_fmt(fit.prefactor)}, "
        f"dispersion = {fit.dispersion:.4f}"
    )
    rows = [(model.describe(), fit.prefactor, fit.dispersion)]
    out = _out_dir(args) / "fit.csv"
    _write_csv(out, ["model", "prefactor", "dispersion"], rows, manifest)
    print(f"wrote {out}")
    return 0


def _write_plot_script(out_dir, moment_zero):
    """Plain-text gnuplot-style companion referencing the sweep CSV."""
    model = "eps*T" if moment_zero else "T/a(eps)"
    script = (
        "# plot sweep.csv: eps vs T_num with the fitted model overlay\n"
        "# columns: eps, T_num_time, h_length, grid_agreement, refined, support_ok\n"
        f"# suggested check: flatness of {model}\n"
        "set logscale xy\n"
        "plot 'sweep.csv' every ::2 using 1:2 with points title 'T_num(eps)'\n"
    )
    (out_dir / "plot_sweep.gp").write_text(script)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="waveblowup",
        description="Numerical laboratory for 2D quadratic semilinear wave blow-up",
    )
    parser.add_argument("--out-dir", default=None, help="output directory for CSVs")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("a-eps", help="solve a^2 eps^2 log(1+a) = 1")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-13)
    p.set_defaults(func=cmd_a_eps)

    p = sub.add_parser("certify", help="build the blow-up certificate constants")
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--k", type=float, default=1.0)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("linear-check", help="fit and certify the linear estimates")
    p.add_argument("--config", required=True)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--quad-tol", type=float, default=1e-7)
    p.set_defaults(func=cmd_linear_check)

    p = sub.add_parser("induction-check", help="verify the iteration steps numerically")
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--j-max", type=int, default=5)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_induction_check)

    p = sub.add_parser("agemi-check", help="check the cone inequality on a run")
    p.add_argument("--config", required=True)
    p.add_argument("--eps", type=float, default=None)
    p.set_defaults(func=cmd_agemi_check)

    p = sub.add_parser("simulate", help="one simulator run with field output")
    p.add_argument("--config", required=True)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--stride", type=int, default=16)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="two-grid validated lifespan sweep")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="fit a scaling model to sweep records")
    p.add_argument("--records", required=True)
    p.add_argument("--model", required=True, help="'a_eps' or 'power:EXP'")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, RuntimeError, ValueError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
