"""Command-line experiment harness.

Subcommands: ``toy-influence``, ``toy-balance``, ``bounds``,
``theory-check``, ``augment-sweep``.  Common flags: ``--seed``,
``--datasets``, ``--out``, ``--jobs``, ``--plot``, ``--config``.

All CSV outputs are deterministic byte-for-byte given (seed, flags);
SVG charts are derived artifacts and never alter CSV contents.  Config
files hold one ``key = value`` per line with ``#`` comments; explicit
flags override file values, which override built-in defaults.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import experiments, svgplot, theory
from .augment import LABEL_INTERVALS, AugmentDistribution, POSITION_LAWS
from .errors import GvlabError

_CONFIG_KEYS = {
    "seed", "datasets", "out", "jobs", "plot",
    "per_class", "epochs", "batch_size", "learning_rate", "momentum", "bins",
    "test_mean_lo", "test_mean_hi", "coupling_var", "residual_var",
    "T", "K", "delta", "n_grid", "gamma_grid",
    "alphas", "laws", "repeats", "tables",
    "alpha", "position_law", "area_lo", "area_hi", "aspect_lo", "aspect_hi",
} | {f"interval_{label}" for label in range(10)}


def parse_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise GvlabError("bad-config", f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise GvlabError("bad-config", f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip() != "")


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip() != "")


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip() != "")


def _resolved(args: argparse.Namespace, config: Mapping[str, str], name: str,
              cast, default):
    """Flag value if given, else config value, else default."""
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    if name in config:
        return cast(config[name])
    return default


def distribution_from_config(config: Mapping[str, str], alpha: float | None = None,
                             position_law: str | None = None) -> AugmentDistribution:
    """Build an erasing-parameter law from config keys, with overrides."""
    intervals = dict(LABEL_INTERVALS)
    for label in range(10):
        key = f"interval_{label}"
        if key in config:
            a1, b1, a2, b2 = (float(v) for v in config[key].split(","))
            intervals[label] = ((a1, b1), (a2, b2))
    return AugmentDistribution(
        alpha=float(config.get("alpha", 0.0)) if alpha is None else alpha,
        label_intervals=intervals,
        position_law=(config.get("position_law", "uniform")
                      if position_law is None else position_law),
        area_range=(float(config.get("area_lo", 0.02)), float(config.get("area_hi", 0.40))),
        aspect_range=(float(config.get("aspect_lo", 1 / 3)),
                      float(config.get("aspect_hi", 3.0))),
    )


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as err:
        raise GvlabError("io-error", f"cannot write {path}: {err}") from err


def _toy_protocol(args: argparse.Namespace, config: Mapping[str, str]) -> experiments.ToyProtocol:
    base = experiments.ToyProtocol()
    return replace(
        base,
        per_class=_resolved(args, config, "per_class", int, base.per_class),
        epochs=_resolved(args, config, "epochs", int, base.epochs),
        batch_size=int(config.get("batch_size", base.batch_size)),
        learning_rate=float(config.get("learning_rate", base.learning_rate)),
        momentum=float(config.get("momentum", base.momentum)),
        bins=int(config.get("bins", base.bins)),
        test_mean_lo=float(config.get("test_mean_lo", base.test_mean_lo)),
        test_mean_hi=float(config.get("test_mean_hi", base.test_mean_hi)),
        coupling_var=float(config.get("coupling_var", base.coupling_var)),
        residual_var=float(config.get("residual_var", base.residual_var)),
    )


def _cmd_toy_influence(args: argparse.Namespace, config: Mapping[str, str]) -> int:
    out = Path(_resolved(args, config, "out", str, "out"))
    result = experiments.toy_influence_run(
        args.seed, args.datasets, _toy_protocol(args, config), args.jobs)
    lines = ["dataset,dim,h_cond,abs_weight,rank_est,rank_true"]
    for r in result.rows:
        lines.append(f"{r.dataset},{r.dim},{r.h_cond!r},{r.abs_weight!r},"
                     f"{r.rank_est},{r.rank_true}")
    _write(out / "influence.csv", "\n".join(lines) + "\n")
    if args.plot:
        by_true: dict[int, list[int]] = {}
        for r in result.rows:
            by_true.setdefault(r.rank_true, []).append(r.rank_est)
        xs = sorted(by_true)
        ys = [float(np.mean(by_true[x])) for x in xs]
        _write(out / "influence_rank.svg",
               svgplot.chart([("estimated rank", xs, ys)], "Influence rank agreement",
                             "ground-truth rank (|weight|)", "estimated rank (cond. entropy)",
                             mode="scatter", diagonal=True))
    print(f"mean rank correlation over {args.datasets} datasets: {result.mean_spearman:.4f}")
    print(f"mean |label-MI - prediction-MI| per dimension: {result.mean_mi_gap:.6f}")
    return 0


def _cmd_toy_balance(args: argparse.Namespace, config: Mapping[str, str]) -> int:
    out = Path(_resolved(args, config, "out", str, "out"))
    rows = experiments.toy_balance_run(
        args.seed, args.datasets, _toy_protocol(args, config), args.jobs)
    lines = ["dataset,dim,w_before,w_after,acc_before,acc_after"]
    for r in rows:
        lines.append(f"{r.dataset},{r.dim},{r.w_before!r},{r.w_after!r},"
                     f"{r.acc_before!r},{r.acc_after!r}")
    _write(out / "balance.csv", "\n".join(lines) + "\n")
    ranks = sorted({r.rank_true for r in rows})
    by_rank = {rank: [r for r in rows if r.rank_true == rank] for rank in ranks}
    w_before = [float(np.mean([r.w_before for r in by_rank[r_]])) for r_ in ranks]
    w_after = [float(np.mean([r.w_after for r in by_rank[r_]])) for r_ in ranks]
    a_before = [float(np.mean([r.acc_before for r in by_rank[r_]])) for r_ in ranks]
    a_after = [float(np.mean([r.acc_after for r in by_rank[r_]])) for r_ in ranks]
    if args.plot:
        _write(out / "balance_weights.svg",
               svgplot.chart([("before", ranks, w_before), ("after", ranks, w_after)],
                             "Absolute weight before/after balancing",
                             "ground-truth influence rank", "mean |weight|"))
        _write(out / "balance_accuracy.svg",
               svgplot.chart([("before", ranks, a_before), ("after", ranks, a_after)],
                             "Test accuracy before/after balancing",
                             "ground-truth influence rank", "mean test accuracy"))
    for rank in ranks[:3]:
        print(f"rank {rank}: mean |w| {w_before[rank - 1]:.4f} -> {w_after[rank - 1]:.4f}, "
              f"mean accuracy {a_before[rank - 1]:.4f} -> {a_after[rank - 1]:.4f}")
    return 0


def _cmd_bounds(args: argparse.Namespace, config: Mapping[str, str]) -> int:
    out = Path(_resolved(args, config, "out", str, "out"))
    t = _resolved(args, config, "T", int, 2)
    k = _resolved(args, config, "K", int, 2)
    delta = _resolved(args, config, "delta", float, 0.05)
    n_grid = _resolved(args, config, "n_grid", _int_list, (1000,))
    gamma_grid = _resolved(args, config, "gamma_grid", _float_list, ())
    reports = []
    for n in n_grid:
        if gamma_grid:
            reports.extend(theory.BoundReport.evaluate(t, k, n, delta, g) for g in gamma_grid)
        else:
            reports.append(theory.BoundReport.evaluate(t, k, n, delta))
    _write(out / "bounds.csv", theory.bound_report_csv(reports))
    print(f"wrote {len(reports)} bound rows to {out / 'bounds.csv'}")
    return 0


def _cmd_theory_check(args: argparse.Namespace, config: Mapping[str, str]) -> int:
    out = Path(_resolved(args, config, "out", str, "out"))
    results = experiments.theory_check_run(
        args.seed, corrupt=args.corrupt,
        tables=_resolved(args, config, "tables", int, 200))
    _write(out / "theory_report.csv", experiments.theory_report_csv(results))
    failed = [r for r in results if not r.passed]
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"{status}  {r.name}  max_deviation={r.max_deviation:.3e}  ({r.detail})")
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(r.name for r in failed)}",
              file=sys.stderr)
        return 1
    return 0


def _cmd_augment_sweep(args: argparse.Namespace, config: Mapping[str, str]) -> int:
    out = Path(_resolved(args, config, "out", str, "out"))
    alphas = _resolved(args, config, "alphas", _float_list, (0.0, 0.5, 1.0))
    laws = _resolved(args, config, "laws", _str_list, ("uniform",))
    for law in laws:
        if law not in POSITION_LAWS:
            raise GvlabError("bad-variable", f"unknown position law {law!r}")
    protocol = experiments.GridProtocol()
    protocol = replace(
        protocol,
        epochs=_resolved(args, config, "epochs", int, protocol.epochs),
        repeats=_resolved(args, config, "repeats", int, protocol.repeats),
    )
    rows = experiments.augment_sweep_run(args.seed, args.datasets, alphas, laws,
                                         protocol, args.jobs,
                                         base_dist=distribution_from_config(config))
    lines = ["alpha,law,changing_ratio,test_error,seed"]
    for r in rows:
        lines.append(f"{r.alpha!r},{r.law},{r.changing_ratio!r},{r.test_error!r},{r.seed}")
    _write(out / "augment.csv", "\n".join(lines) + "\n")
    if args.plot:
        ratio_series, error_series = [], []
        for law in laws:
            xs = list(alphas)
            ratios = [float(np.mean([r.changing_ratio for r in rows
                                     if r.law == law and r.alpha == a])) for a in xs]
            errors = [float(np.mean([r.test_error for r in rows
                                     if r.law == law and r.alpha == a])) for a in xs]
            ratio_series.append((law, xs, ratios))
            error_series.append((law, xs, errors))
        _write(out / "augment_ratio.svg",
               svgplot.chart(ratio_series, "Prediction changing ratio vs mixture weight",
                             "alpha", "changing ratio"))
        _write(out / "augment_error.svg",
               svgplot.chart(error_series, "Test error vs mixture weight",
                             "alpha", "test error"))
    for law in laws:
        for a in alphas:
            cell = [r for r in rows if r.law == law and r.alpha == a]
            print(f"alpha={a} law={law}: changing_ratio="
                  f"{float(np.mean([r.changing_ratio for r in cell])):.4f} "
                  f"test_error={float(np.mean([r.test_error for r in cell])):.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gvlab",
                                     description="generative-variable experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="base RNG seed")
        p.add_argument("--datasets", type=int, default=None,
                       help="dataset / seed replication count")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--jobs", type=int, default=None, help="worker process count")
        p.add_argument("--plot", type=_parse_bool, default=None,
                       help="emit SVG charts (true/false)")
        p.add_argument("--config", type=str, default=None, help="key = value config file")

    p = sub.add_parser("toy-influence", help="influence-rank agreement experiment")
    common(p)
    p.add_argument("--per-class", dest="per_class", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)

    p = sub.add_parser("toy-balance", help="balance-and-retrain sweep")
    common(p)
    p.add_argument("--per-class", dest="per_class", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)

    p = sub.add_parser("bounds", help="evaluate generalization bounds over grids")
    common(p)
    p.add_argument("--T", dest="T", type=int, default=None)
    p.add_argument("--K", dest="K", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--n-grid", dest="n_grid", type=_int_list, default=None)
    p.add_argument("--gamma-grid", dest="gamma_grid", type=_float_list, default=None)

    p = sub.add_parser("theory-check", help="run the closed-form verification sweeps")
    common(p)
    p.add_argument("--tables", type=int, default=None)
    p.add_argument("--corrupt", type=str, default=None,
                   help="test hook: corrupt the named check's closed form")

    p = sub.add_parser("augment-sweep", help="random-erasing law sweep on the grid task")
    common(p)
    p.add_argument("--alphas", type=_float_list, default=None)
    p.add_argument("--laws", type=_str_list, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--repeats", type=int, default=None)
    return parser


_HANDLERS = {
    "toy-influence": _cmd_toy_influence,
    "toy-balance": _cmd_toy_balance,
    "bounds": _cmd_bounds,
    "theory-check": _cmd_theory_check,
    "augment-sweep": _cmd_augment_sweep,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_config(args.config) if args.config else {}
        args.seed = _resolved(args, config, "seed", int, 20240501)
        args.datasets = _resolved(args, config, "datasets", int, 100)
        args.jobs = _resolved(args, config, "jobs", int, 1)
        args.plot = _resolved(args, config, "plot", _parse_bool, True)
        if args.datasets < 1:
            raise GvlabError("bad-config", "datasets must be >= 1")
        return _HANDLERS[args.command](args, config)
    except (GvlabError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def entry() -> None:  # console-script shim
    raise SystemExit(main())
