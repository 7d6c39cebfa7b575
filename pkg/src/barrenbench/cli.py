"""Command-line front end: ``barrenbench {run,sweep,oracle,moments}``.

Exit codes: 0 success, 2 invalid input, 3 unconverged results,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig
from .errors import BarrenBenchError, DegenerateRegimeError, SizeGuardError, ValidationError
from .experiment import (
    distance_point,
    fit_exponential,
    mc_variance,
    size_point,
    sweep_distance,
    sweep_system_size,
    theorem1_bound,
    theorem2_bound,
)
from .reporting import (
    CSV_HEADER,
    ORACLE_HEADER,
    RunManifest,
    append_rows,
    config_hash,
    csv_row,
    svg_plot,
    write_json,
)
from .unitary import haar_batch

__all__ = ["main", "build_parser", "parse_values", "EXIT_OK", "EXIT_INVALID",
           "EXIT_UNCONVERGED", "EXIT_NUMERICAL"]

EXIT_OK, EXIT_INVALID, EXIT_UNCONVERGED, EXIT_NUMERICAL = 0, 2, 3, 4
SEED_ENV = "BARRENBENCH_SEED"
MOMENT_SAMPLES = 100_000


def parse_values(text: str) -> list[int]:
    """``"5,6,9"`` or an inclusive range ``"5:12"`` (optionally ``"5:15:2"``)."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            step = parts[2] if len(parts) == 3 else 1
            return list(range(parts[0], parts[1] + 1, step))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ValidationError(f"--values: cannot parse {text!r}") from None


def _load_config(args) -> ExperimentConfig:
    if not os.path.exists(args.config):
        raise ConfigError("--config", f"no such file {args.config}")
    with open(args.config) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}", exc.msg) from exc
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    if args.seed is not None:
        raw["seed"] = args.seed
    elif "seed" not in raw and os.environ.get(SEED_ENV):
        try:
            raw["seed"] = int(os.environ[SEED_ENV])
        except ValueError:
            raise ConfigError(SEED_ENV, "must be an integer") from None
    if args.out is not None:
        raw["output_dir"] = args.out
    return ExperimentConfig.from_dict(raw)


def _global_bound(cfg: ExperimentConfig):
    if cfg.loss in ("fidelity", "normalized") and cfg.mode != "raw_tensor":
        g = cfg.split_generator()
        return theorem1_bound(cfg.n, cfg.D, cfg.d, float(np.trace(g).real),
                              float(np.trace(g @ g).real))
    return None


# ---------------------------------------------------------------------------
def cmd_run(args) -> int:
    cfg = _load_config(args)
    rid = config_hash(cfg)[:12]
    out = cfg.output_dir
    report_path = os.path.join(out, f"report-{rid}.json")
    csv_path = os.path.join(out, "results.csv")
    RunManifest.for_config("run", cfg, [report_path, csv_path]).write(
        os.path.join(out, f"manifest-{rid}.json"))
    bound = _global_bound(cfg)
    report = mc_variance(cfg, threads=args.threads, bound=bound)
    write_json(report_path, {"config": cfg.to_dict(), "delta": cfg.delta,
                             "report": report.to_dict(timing=False)})
    append_rows(csv_path, CSV_HEADER, [csv_row(cfg, report, bound)])
    print(f"run {rid}: mean {report.mean_grad:.6g} var {report.var_grad:.6g} "
          f"+- {report.std_error:.3g} samples {report.samples_used} "
          f"converged {report.converged} ({report.wall_time:.1f} s)")
    return EXIT_OK if report.converged else EXIT_UNCONVERGED


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    values = parse_values(args.values)
    if not values:
        raise ValidationError("--values: empty list")
    rid = config_hash(cfg)[:12]
    out = cfg.output_dir
    stem = os.path.join(out, f"sweep-{args.axis}-{rid}")
    csv_path = os.path.join(out, "results.csv")
    RunManifest.for_config(f"sweep {args.axis} {args.values}", cfg,
                           [csv_path, stem + ".json", stem + ".svg"]).write(stem + ".manifest.json")
    if args.axis == "n":
        reports = sweep_system_size(cfg, values, threads=args.threads, bound=_global_bound)
        configs = [size_point(cfg, v) for v in values]
        bounds = [r.bound_value for r in reports]
        if all(b is None for b in bounds):
            bounds = None
    else:
        reports = sweep_distance(cfg, values, threads=args.threads)
        configs = [distance_point(cfg, v) for v in values]
        bounds = None
        if 1 in values:
            c = reports[values.index(1)].var_grad * cfg.d
            if c > 0:
                bounds = [theorem2_bound(v, cfg.d, c) for v in values]
    append_rows(csv_path, CSV_HEADER,
                [csv_row(c, r, None if bounds is None else b)
                 for c, r, b in zip(configs, reports, bounds or [None] * len(reports))])
    variances = [r.var_grad for r in reports]
    summary = {"axis": args.axis, "values": values, "variances": variances,
               "std_errors": [r.std_error for r in reports],
               "means": [r.mean_grad for r in reports],
               "mean_std_errors": [r.mean_std_error for r in reports],
               "bound": bounds, "fit": None}
    if len(values) >= 3 and all(v > 0 for v in variances):
        summary["fit"] = fit_exponential(values, variances).to_dict()
    else:
        print("warning: fewer than three positive points; decay fit omitted", file=sys.stderr)
    write_json(stem + ".json", summary)
    label = "system size n" if args.axis == "n" else "distance delta"
    with open(stem + ".svg", "w") as fh:
        fh.write(svg_plot(values, variances, xlabel=label, ylabel="gradient variance",
                          title=f"{cfg.loss} loss, {cfg.mode}", bound=bounds,
                          bound_label="theorem bound" if args.axis == "n" else "C d^-delta"))
    for v, r in zip(values, reports):
        print(f"{args.axis}={v}: var {r.var_grad:.6g} +- {r.std_error:.3g} "
              f"mean {r.mean_grad:.3g} samples {r.samples_used} converged {r.converged}")
    if summary["fit"]:
        print(f"fit: per-step factor {summary['fit']['per_step_factor']:.4g} "
              f"R^2 {summary['fit']['r_squared']:.4f}")
    return EXIT_OK if all(r.converged for r in reports) else EXIT_UNCONVERGED


def cmd_oracle(args) -> int:
    from .weingarten import exact_grad_mean, exact_grad_variance, oracle_loss_kind
    cfg = _load_config(args)
    kind = oracle_loss_kind(cfg.loss)
    mean = exact_grad_mean(cfg) + 0.0
    var = exact_grad_variance(cfg)
    print(f"exact mean {mean:.6g}")
    print(f"exact variance {var:.10g}")
    mc_var = mc_se = z = None
    if args.compare_mc:
        mc_cfg = cfg.replace(loss=kind, mode="haar_split")
        rep = mc_variance(mc_cfg, threads=args.threads)
        mc_var, mc_se = rep.var_grad, rep.std_error
        z = (mc_var - var) / mc_se if mc_se > 0 else 0.0
        print(f"monte carlo variance {mc_var:.6g} +- {mc_se:.3g} ({rep.samples_used} samples), "
              f"z = {z:.3f}")
    row = [config_hash(cfg)[:12], cfg.n, cfg.d, cfg.D, kind, cfg.delta, mean, var, mc_var,
           mc_se, z]
    append_rows(os.path.join(cfg.output_dir, "oracle.csv"), ORACLE_HEADER, [row])
    return EXIT_OK


def cmd_moments(args) -> int:
    from .weingarten import moment_tensor, partitions_of, weingarten_by_type
    N, t = args.N, args.t
    if N < 1 or t < 1:
        raise ValidationError("N and t must be positive")
    if t > 3:
        raise ValidationError("table mode supports t <= 3")
    if N < t:
        raise DegenerateRegimeError(f"N = {N} < t = {t}: Weingarten regime not supported")
    print(f"Weingarten values for U({N}), t = {t}")
    for eta in partitions_of(t):
        print(f"  cycle type {eta.parts}: {weingarten_by_type(eta, N)}")
    if t > 2:
        return EXIT_OK
    seed = args.seed if args.seed is not None else int(os.environ.get(SEED_ENV, "0") or 0)
    ok = _check_moments(moment_tensor(N, t).kron_matrix(), N, t, seed)
    print("moment tensor check:", "pass" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_NUMERICAL


def _check_moments(k: np.ndarray, N: int, t: int, seed: int, samples: int = MOMENT_SAMPLES) -> bool:
    """Compare exact moments with sample averages (5 standard errors).

    t = 1 checks every entry. t = 2 checks the entries E|U_a|^2 |U_b|^2 and
    E U_{i1 j1} U_{i2 j2} conj(U_{i2 j1} U_{i1 j2}), which carry both
    connection weights.
    """
    rng = np.random.default_rng(seed)
    idx = [(i, j) for i in range(N) for j in range(N)]
    s1 = s2 = 0.0
    for start in range(0, samples, 10_000):
        u = haar_batch(N, min(10_000, samples - start), rng)
        if t == 1:
            f = u.reshape(len(u), -1)
            vals = (f[:, :, None] * f.conj()[:, None, :]).reshape(len(u), -1)
        else:
            cols = []
            for (i1, j1) in idx:
                for (i2, j2) in idx:
                    cols.append(np.abs(u[:, i1, j1]) ** 2 * np.abs(u[:, i2, j2]) ** 2)
                    cols.append(u[:, i1, j1] * u[:, i2, j2]
                                * np.conj(u[:, i2, j1] * u[:, i1, j2]))
            vals = np.stack(cols, axis=1)
        s1 = s1 + vals.sum(axis=0)
        s2 = s2 + (np.abs(vals) ** 2).sum(axis=0)
    mean = s1 / samples
    se = np.sqrt(np.maximum(s2 / samples - np.abs(mean) ** 2, 0.0) / samples)
    if t == 1:
        # vals[(i,j),(i',j')] = U_ij conj(U_i'j')
        exact = np.empty(N ** 4, dtype=complex)
        for a, (i, j) in enumerate(idx):
            for b, (ip, jp) in enumerate(idx):
                exact[a * N * N + b] = k[i * N + ip, j * N + jp]
    else:
        exact = []
        for (i1, j1) in idx:
            for (i2, j2) in idx:
                exact.append(k[((i1 * N + i2) * N + i1) * N + i2, ((j1 * N + j2) * N + j1) * N + j2])
                exact.append(k[((i1 * N + i2) * N + i2) * N + i1, ((j1 * N + j2) * N + j1) * N + j2])
        exact = np.array(exact)
    dev = np.abs(mean - exact)
    return bool(np.all(dev <= 5 * se + 1e-12))


# ---------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="barrenbench", description="Gradient-variance experiments "
                                "for unitary-embedded matrix product states.")
    p.add_argument("--version", action="version", version=f"barrenbench {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_config=True):
        if needs_config:
            sp.add_argument("--config", required=True, metavar="PATH")
            sp.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        sp.add_argument("--seed", type=int, default=None,
                        help=f"override the seed (fallback: ${SEED_ENV})")

    common(sub.add_parser("run", help="one Monte-Carlo experiment"))
    sp = sub.add_parser("sweep", help="sweep system size or distance")
    common(sp)
    sp.add_argument("--axis", choices=("n", "delta"), required=True)
    sp.add_argument("--values", required=True, help="comma list or inclusive range a:b[:step]")
    sp = sub.add_parser("oracle", help="exact Haar mean and variance")
    common(sp)
    sp.add_argument("--compare-mc", action="store_true")
    sp = sub.add_parser("moments", help="Weingarten table and moment check")
    common(sp, needs_config=False)
    sp.add_argument("N", type=int)
    sp.add_argument("t", type=int)
    return p


_COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "oracle": cmd_oracle, "moments": cmd_moments}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INVALID
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SizeGuardError, DegenerateRegimeError, ValidationError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ArithmeticError, np.linalg.LinAlgError, BarrenBenchError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
