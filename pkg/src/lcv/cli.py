"""Command-line front end.

Subcommands: analyze-pair, matrix, mr, simulate, build-ld, benchmark,
gcp-sweep. Global flags (--seed, --blocks, --grid-step, --workers,
--json/--tsv) may also be set from a JSON config file via --config; explicit
command-line values win.

Exit codes: 0 success, 2 data error, 3 statistical inapplicability
(e.g. no heritability signal, no usable instruments), 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import bench
from .errors import DataError, LcvError
from .pipeline import LCV_TSV_COLUMNS, analyze_pair, run_mr_suite
from .presets import get_scenario, preset_scenarios
from .sim import SimScenario, build_ld_blocks, simulate, synthetic_ld_blocks
from .sumstats import (
    ColumnMap,
    LdScoreTable,
    align_pair,
    parse_ld_scores,
    parse_sumstats,
    write_ld_scores,
    write_sumstats,
)


def _add_global_flags(parser):
    parser.add_argument("--config", help="JSON file providing defaults for any flag")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--blocks", type=int, default=100, help="jackknife block count")
    parser.add_argument("--grid-step", type=float, default=0.01)
    parser.add_argument("--workers", type=int, default=1)
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="as_json", action="store_true", help="emit JSON")
    fmt.add_argument("--tsv", dest="as_json", action="store_false", help="emit TSV (default)")
    parser.set_defaults(as_json=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcv", description=__doc__.splitlines()[0])
    _add_global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze-pair", help="full causal analysis of one trait pair")
    pa.add_argument("--sumstats1", required=True)
    pa.add_argument("--sumstats2", required=True)
    pa.add_argument("--ldscores", help="LD score TSV; omitted means ell = 1 everywhere")
    pa.add_argument("--column-map", help="JSON file remapping sumstats column names")
    pa.add_argument(
        "--constrained-intercepts",
        action="store_true",
        help="pin intercepts at their no-LD/no-overlap values instead of fitting them",
    )
    pa.add_argument("--mr", action="store_true", help="also run the MR baselines")
    pa.add_argument("--out", help="output prefix; writes <out>.json and <out>.tsv")

    pm = sub.add_parser("matrix", help="all-pairs analysis with prescreen and FDR")
    pm.add_argument("--sumstats", nargs="+", required=True)
    pm.add_argument("--ldscores")
    pm.add_argument("--column-map")
    pm.add_argument("--constrained-intercepts", action="store_true")
    pm.add_argument("--prescreen-p", type=float, default=0.05)
    pm.add_argument("--fdr", type=float, default=0.01)
    pm.add_argument("--out", help="output prefix; writes <out>.pairs.tsv and <out>.fdr.tsv")

    pr = sub.add_parser("mr", help="MR baselines only (exposure = first file)")
    pr.add_argument("--exposure", required=True)
    pr.add_argument("--outcome", required=True)
    pr.add_argument("--ldscores")
    pr.add_argument("--column-map")
    pr.add_argument("--threshold-p", type=float, default=5e-8)
    pr.add_argument("--methods", default="mr,egger,bidir")
    pr.add_argument(
        "--prune-window-cm",
        type=float,
        default=None,
        help="greedy-prune instruments to this genetic-map separation first",
    )

    ps = sub.add_parser("simulate", help="write one simulated replicate to TSV files")
    ps.add_argument("--scenario", required=True, help="preset name or scenario JSON path")
    ps.add_argument("--out-dir", required=True)
    ps.add_argument("--list", action="store_true", help="list preset names and exit")

    pl = sub.add_parser("build-ld", help="build synthetic LD blocks and LD scores")
    pl.add_argument("--m-snps", type=int, default=10_000)
    pl.add_argument("--block-size", type=int, default=50)
    pl.add_argument("--rho-ld", type=float, default=0.5)
    pl.add_argument("--out", required=True, help="output prefix; writes <out>.l2.tsv and <out>.npz")

    pb = sub.add_parser("benchmark", help="replicated calibration/power suites")
    pb.add_argument("--scenarios", required=True, help="comma-separated preset names")
    pb.add_argument("--reps", type=int, default=500)
    pb.add_argument("--methods", default="lcv,mr,egger,bidir")
    pb.add_argument("--out", help="output prefix; writes <out>.summary.tsv and <out>.long.tsv")

    pg = sub.add_parser("gcp-sweep", help="random-gcp unbiasedness sweep")
    pg.add_argument("--reps", type=int, default=1000)
    pg.add_argument("--rho-floor", type=float, default=0.05)
    pg.add_argument("--m-snps", type=int, default=10_000)
    pg.add_argument("--ld-mode", choices=["none", "blocks"], default="none")
    pg.add_argument("--out", help="output prefix; writes <out>.sweep.tsv")
    return parser


def _apply_config(parser, argv):
    """Let --config provide defaults without overriding explicit flags."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if known.config:
        with open(known.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise DataError("--config must contain a JSON object")
        cfg = {key.replace("-", "_"): val for key, val in cfg.items()}
        parser.set_defaults(**cfg)


def _column_map(path) -> ColumnMap | None:
    if not path:
        return None
    with open(path) as fh:
        return ColumnMap.from_dict(json.load(fh))


def _load_pair_inputs(path1, path2, ld_path, cmap_path):
    cmap = _column_map(cmap_path)
    t1 = parse_sumstats(path1, cmap, trait_label=Path(path1).stem)
    t2 = parse_sumstats(path2, cmap, trait_label=Path(path2).stem)
    if ld_path:
        ld = parse_ld_scores(ld_path)
    else:
        ld = LdScoreTable.constant(set(t1.snp_ids()) | set(t2.snp_ids()))
    return align_pair(t1, t2, ld)


def _emit(obj, as_json: bool, tsv_rows=None, tsv_columns=None):
    if as_json or tsv_rows is None:
        print(json.dumps(obj, indent=2, default=_jsonable))
    else:
        df = pd.DataFrame(tsv_rows, columns=tsv_columns)
        print(df.to_csv(sep="\t", index=False), end="")


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, frozenset):
        return sorted(x)
    raise TypeError(f"not JSON-serializable: {type(x)}")


def cmd_analyze_pair(args) -> int:
    pair = _load_pair_inputs(args.sumstats1, args.sumstats2, args.ldscores, args.column_map)
    report = analyze_pair(
        pair,
        k_blocks=args.blocks,
        grid_step=args.grid_step,
        constrained_intercepts=args.constrained_intercepts,
        mr_methods=("mr", "egger", "bidir") if args.mr else (),
    )
    row = report.lcv_row()
    if args.out:
        with open(f"{args.out}.json", "w") as fh:
            json.dump(report.to_dict(), fh, indent=2, default=_jsonable)
        pd.DataFrame([row], columns=LCV_TSV_COLUMNS).to_csv(
            f"{args.out}.tsv", sep="\t", index=False
        )
    _emit(report.to_dict(), args.as_json, [row], LCV_TSV_COLUMNS)
    return 0


def cmd_matrix(args) -> int:
    cmap = _column_map(args.column_map)
    tables = [parse_sumstats(p, cmap, trait_label=Path(p).stem) for p in args.sumstats]
    if args.ldscores:
        ld = parse_ld_scores(args.ldscores)
    else:
        ids = set()
        for t in tables:
            ids |= set(t.snp_ids())
        ld = LdScoreTable.constant(ids)
    decision, reports, skipped = bench.run_matrix(
        tables,
        ld,
        prescreen_p=args.prescreen_p,
        fdr_level=args.fdr,
        k_blocks=args.blocks,
        grid_step=args.grid_step,
        constrained_intercepts=args.constrained_intercepts,
    )
    pair_rows = [r.lcv_row() for r in reports]
    fdr_rows = [
        {"pair": pid, "p": p, "q": q, "rejected": int(rej)}
        for pid, p, q, rej in decision.pairs
    ]
    if args.out:
        pd.DataFrame(pair_rows, columns=LCV_TSV_COLUMNS).to_csv(
            f"{args.out}.pairs.tsv", sep="\t", index=False
        )
        pd.DataFrame(fdr_rows, columns=["pair", "p", "q", "rejected"]).to_csv(
            f"{args.out}.fdr.tsv", sep="\t", index=False
        )
    payload = {
        "fdr_level": decision.level,
        "n_pairs": len(reports),
        "n_in_family": len(decision.pairs),
        "n_rejected": decision.n_rejected(),
        "pairs": pair_rows,
        "fdr": fdr_rows,
        "skipped": skipped,
    }
    _emit(payload, args.as_json, pair_rows, LCV_TSV_COLUMNS)
    return 0


def cmd_mr(args) -> int:
    pair = _load_pair_inputs(args.exposure, args.outcome, args.ldscores, args.column_map)
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    results = run_mr_suite(
        pair,
        methods=methods,
        threshold_p=args.threshold_p,
        prune_window_cm=args.prune_window_cm,
    )
    rows = [r.to_dict() for r in results]
    cols = ["method", "exposure", "outcome", "estimate", "se", "p", "k_instruments"]
    _emit(rows, args.as_json, [{c: r.get(c) for c in cols} for r in rows], cols)
    return 0


def cmd_simulate(args) -> int:
    if args.list:
        for name in sorted(preset_scenarios()):
            print(name)
        return 0
    if Path(args.scenario).exists():
        scenario = SimScenario.from_json(args.scenario)
    else:
        scenario = get_scenario(args.scenario)
    out = simulate(scenario, seed=args.seed)
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_sumstats(out.sumstats1, outdir / "trait1.sumstats.tsv")
    write_sumstats(out.sumstats2, outdir / "trait2.sumstats.tsv")
    write_ld_scores(out.ld_scores, outdir / "ldscores.tsv", snp_ids=out.sumstats1.snp_ids())
    truth = out.truth.to_dict()
    truth["scenario"] = scenario.to_dict()
    truth["seed"] = args.seed
    with open(outdir / "truth.json", "w") as fh:
        json.dump(truth, fh, indent=2, default=_jsonable)
    print(f"wrote {outdir}/trait[12].sumstats.tsv, ldscores.tsv, truth.json")
    return 0


def cmd_build_ld(args) -> int:
    raw = synthetic_ld_blocks(args.m_snps, args.block_size, args.rho_ld)
    ld = build_ld_blocks(raw)
    ids = [f"rs{i + 1}" for i in range(len(ld))]
    table = LdScoreTable.from_arrays(ids, ld.ld_scores)
    write_ld_scores(table, f"{args.out}.l2.tsv", snp_ids=ids)
    np.savez_compressed(
        f"{args.out}.npz", **{f"block{i}": b for i, b in enumerate(ld.blocks)}
    )
    print(f"wrote {args.out}.l2.tsv and {args.out}.npz ({len(ld.blocks)} blocks)")
    return 0


_SUMMARY_COLS = [
    "scenario", "method", "n_reps", "n_failed",
    "fpr_05", "fpr_001", "mean_gcp", "sd_gcp", "rms_se", "mean_chi2",
]


def cmd_benchmark(args) -> int:
    names = [s.strip() for s in args.scenarios.split(",") if s.strip()]
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    summaries, _ = bench.run_benchmark(
        names,
        n_reps=args.reps,
        methods=methods,
        seed=args.seed,
        k_blocks=args.blocks,
        grid_step=args.grid_step,
        workers=args.workers,
    )
    rows = [s.to_dict() for s in summaries]
    long_rows = [
        {"scenario": r["scenario"], "method": r["method"], "metric": k, "value": r[k]}
        for r in rows
        for k in ("fpr_05", "fpr_001", "mean_gcp", "sd_gcp", "rms_se", "mean_chi2")
    ]
    if args.out:
        pd.DataFrame(rows, columns=_SUMMARY_COLS).to_csv(
            f"{args.out}.summary.tsv", sep="\t", index=False
        )
        pd.DataFrame(long_rows).to_csv(f"{args.out}.long.tsv", sep="\t", index=False)
    _emit(rows, args.as_json, rows, _SUMMARY_COLS)
    return 0


def cmd_gcp_sweep(args) -> int:
    summary, rows = bench.run_gcp_sweep(
        n_reps=args.reps,
        seed=args.seed,
        rho_floor=args.rho_floor,
        m_snps=args.m_snps,
        ld_mode=args.ld_mode,
        k_blocks=args.blocks,
        grid_step=args.grid_step,
    )
    if args.out:
        pd.DataFrame(rows).to_csv(f"{args.out}.sweep.tsv", sep="\t", index=False)
    cols = list(summary.to_dict())
    _emit(summary.to_dict(), args.as_json, [summary.to_dict()], cols)
    return 0


_DISPATCH = {
    "analyze-pair": cmd_analyze_pair,
    "matrix": cmd_matrix,
    "mr": cmd_mr,
    "simulate": cmd_simulate,
    "build-ld": cmd_build_ld,
    "benchmark": cmd_benchmark,
    "gcp-sweep": cmd_gcp_sweep,
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return _DISPATCH[args.command](args)
    except LcvError as err:
        print(f"error [{err.qualified_name()}]: {err}", file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print(f"error [io]: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
