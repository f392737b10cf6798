"""Command line entry point: ``kmustar {gen,run,bench,analyze,report}``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import bench, datagen
from .io import FormatError, RunReport, load_reports, save_dataset, save_reports
from .jumps import JumpConfig, run_kms, run_kmu
from .kmeans import LloydConfig, kmeans
from .seeding import SeedingConfig, kmpp


def _add_gen(sub):
    p = sub.add_parser("gen", help="write a synthetic dataset")
    kinds = p.add_subparsers(dest="kind", required=True)

    g = kinds.add_parser("grid-a", help="6x6 clusters of 6x6 lattice points")
    g.add_argument("--clusters-per-side", type=int, default=6)
    g.add_argument("--points-per-side", type=int, default=6)
    g.add_argument("--intra-spacing", type=float, default=1 / 72)
    g.add_argument("--cluster-pitch", type=float, default=1 / 6)

    f = kinds.add_parser("flat-b", help="uniform lattice on the unit square")
    f.add_argument("--n-side", type=int, default=36)

    o = kinds.add_parser("oned", help="1-D chain of equal clusters")
    o.add_argument("--g", type=int, default=50)
    o.add_argument("--h", type=int, default=20)
    o.add_argument("--a", type=float, default=1.0)
    o.add_argument("--eta", type=float, default=10.0)

    m = kinds.add_parser("gmm", help="Gaussian mixture, component means in the unit cube")
    m.add_argument("--d", type=int, default=5)
    m.add_argument("--g", type=int, default=50)
    m.add_argument("--n", type=int, default=2000)
    m.add_argument("--sigma", type=float, default=1e-5)
    m.add_argument("--seed", type=int, default=0)

    for q in (g, f, o, m):
        q.add_argument("--out", required=True, help="destination CSV")


def _add_run(sub):
    p = sub.add_parser("run", help="run one clustering algorithm")
    p.add_argument("--algo", choices=["km", "kmpp", "kmu", "kms"], default="kms")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--input", required=True,
                   help="dataset file, or one of grid-a, flat-b, oned, gmm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--retries", type=int, default=2, help="retry_max for kms")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--candidates", type=int, default=None)
    p.add_argument("--max-iterations", type=int, default=300)
    p.add_argument("--scale", action="store_true", help="standardize each column first")
    p.add_argument("--header", action="store_true", help="input CSV has a header row")
    p.add_argument("--delimiter", default=None)
    p.add_argument("--columns", default=None, help="comma separated column indices or names")
    p.add_argument("--out", default=None, help="append the RunReport here (JSON Lines)")
    p.add_argument("--centers-out", default=None, help="write the final centers as CSV")
    p.add_argument("--trace", default=None, help="write the jump trace (JSON Lines)")


def _add_bench(sub):
    p = sub.add_parser("bench", help="run an experiment plan")
    p.add_argument("--plan", required=True, help="JSON plan file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--jobs", type=int, default=1)


def _add_analyze(sub):
    p = sub.add_parser("analyze", help="evaluate the closed-form seeding probabilities")
    what = p.add_subparsers(dest="what", required=True)
    pc = what.add_parser("pcorr", help="chance that k-means++ doubles every cluster correctly")
    pc.add_argument("--g", type=int, nargs="+", required=True)
    pf = what.add_parser("pf", help="bound on a wrong seeding into covered clusters")
    pf.add_argument("--g", type=int, required=True)
    pf.add_argument("--i", type=int, nargs="+", required=True)
    pf.add_argument("--eta", type=float, nargs="+", required=True)
    fr = what.add_parser("f-ratio", help="one-center vs two-center segment error")
    fr.add_argument("--a", type=float, nargs="+", default=[1.0])


def _add_report(sub):
    p = sub.add_parser("report", help="plot-ready CSV from run reports or a summary")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--reports", help="runs.jsonl written by bench")
    src.add_argument("--summary", help="summary.csv written by bench")
    p.add_argument("--long", action="store_true", help="emit the long summary format")
    p.add_argument("--out", default=None, help="destination (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kmustar", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="cmd", required=True)
    for add in (_add_gen, _add_run, _add_bench, _add_analyze, _add_report):
        add(sub)
    return parser


def cmd_gen(args) -> int:
    if args.kind == "grid-a":
        data = datagen.gen_grid(datagen.GridSpec(args.clusters_per_side, args.points_per_side,
                                                 args.intra_spacing, args.cluster_pitch))
    elif args.kind == "flat-b":
        data = datagen.gen_uniform_grid(args.n_side)
    elif args.kind == "oned":
        data = datagen.gen_1d(datagen.OneDSpec(args.g, args.h, args.a, args.eta))
    else:
        data = datagen.gen_mixture(datagen.MixtureSpec(args.d, args.g, args.sigma, args.n),
                                   np.random.default_rng(args.seed))
    save_dataset(data, args.out)
    print(f"wrote {data.name}: n={data.n} d={data.d} -> {args.out}")
    return 0


def cmd_run(args) -> int:
    source = args.input
    if args.header or args.columns or args.delimiter:
        source = {"path": args.input, "header": args.header,
                  "delimiter": args.delimiter or ",",
                  "columns": args.columns.split(",") if args.columns else None}
    if args.scale:
        source = {"path": args.input} if isinstance(source, str) else source
        source["scale"] = True
    data = bench.resolve_dataset(source, args.seed)

    rng = np.random.default_rng(args.seed)
    lloyd_cfg = LloydConfig(max_iterations=args.max_iterations)
    t0 = time.perf_counter()
    trace = None
    if args.algo == "km":
        # best of ``restarts`` random seedings
        runs = [kmeans(data, args.k, r, lloyd_cfg) for r in rng.spawn(args.restarts)]
        res = min(runs, key=lambda r: r.sse)
        iters = sum(r.iterations for r in runs)
    else:
        res = kmpp(data, SeedingConfig(args.k, args.candidates, args.restarts), lloyd_cfg, rng)
        iters = res.total_iterations
        if args.algo == "kmu":
            res, trace = run_kmu(data, res, lloyd_cfg, JumpConfig(args.epsilon, 0), rng)
        elif args.algo == "kms":
            res, trace = run_kms(data, res, lloyd_cfg, JumpConfig(args.epsilon, args.retries), rng)
        if trace is not None:
            iters += trace.lloyd_iterations
    report = RunReport(
        dataset=data.name, algorithm=args.algo, k=args.k, seed=args.seed, sse=res.sse,
        iterations_lloyd=iters,
        jumps_attempted=trace.attempted if trace else 0,
        jumps_accepted=trace.accepted if trace else 0,
        retries_used=trace.retries if trace else 0,
        wall_time_ms=1e3 * (time.perf_counter() - t0),
    )
    if args.out:
        prior = load_reports(args.out) if Path(args.out).exists() else []
        save_reports(prior + [report], args.out)
    if args.centers_out:
        np.savetxt(args.centers_out, res.centers, delimiter=",", fmt="%.17g")
    if args.trace and trace is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            trace.to_jsonl(fh)
    print(f"{args.algo} k={args.k} sse={res.sse:.6g} lloyd_iterations={iters}"
          + (f" jumps={trace.attempted} accepted={trace.accepted}" if trace else ""))
    return 0


def cmd_bench(args) -> int:
    plan = bench.ExperimentPlan.from_file(args.plan)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = bench.run_experiment(plan, jobs=args.jobs)
    save_reports(result.reports, out / "runs.jsonl")
    bench.write_summary(result.summaries, out / "summary.csv")
    bench.write_summary(result.summaries, sys.stdout)
    for err in result.errors:
        print(f"error: {err}", file=sys.stderr)
    return 1 if result.errors else 0


def cmd_analyze(args) -> int:
    if args.what == "pcorr":
        print("g,pcorr")
        for g in args.g:
            print(f"{g},{datagen.pcorr(g):.6e}")
    elif args.what == "pf":
        print("g,i,eta,pf")
        for i in args.i:
            for eta in args.eta:
                print(f"{args.g},{i},{eta:g},{datagen.pf_wrong_seeding(i, args.g, eta):.6e}")
    else:
        print("a,f1,f2,ratio")
        for a in args.a:
            f1, f2 = datagen.f_one(a), datagen.f_two(a)
            print(f"{a:g},{f1:.6e},{f2:.6e},{f1 / f2:g}")
    return 0


def cmd_report(args) -> int:
    if args.reports:
        summaries = bench.summarize(load_reports(args.reports))
    else:
        summaries = bench.read_summary(args.summary)
    writer = bench.write_summary if args.long else bench.write_plot_table
    writer(summaries, args.out if args.out else sys.stdout)
    return 0


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "bench": cmd_bench,
            "analyze": cmd_analyze, "report": cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.cmd](args)
    except (FormatError, FileNotFoundError, ValueError) as exc:
        print(f"kmustar {args.cmd}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
