"""Command-line experiment runner.

Subcommands:

* ``corpus``     write the committed corpus to disk with a manifest
* ``calibrate``  run the budget-tier verifiers and freeze their budgets
* ``run``        run one experiment (or ``all``) and emit CSV reports
* ``report``     summarize previously written reports

Config files are flat ``key = value`` text; repeated keys accumulate into
lists; ``#`` starts a comment.  Command-line flags override config values.
Exit status: 0 on success, 1 if any verdict is fail, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from .calibration import (DEFAULT_MARGIN, calibrate_from_reports, load_budgets,
                          save_budgets)
from .corpus import corpus_hash
from .errors import AgfError
from .experiments import (EXPERIMENTS, ExperimentResult, default_corpus,
                          run_experiment)
from .grid import save_agf

_DEFAULT_SEED = 20240901


def parse_config(path) -> dict[str, list[str]]:
    """Flat key=value config; repeated keys accumulate; '#' comments."""
    out: dict[str, list[str]] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise AgfError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, _, val = line.partition("=")
            out.setdefault(key.strip(), []).append(val.strip())
    return out


def _cfg_scalar(cfg, key, default=None):
    vals = cfg.get(key)
    if not vals:
        return default
    return vals[-1]


def _fmt(x) -> str:
    return repr(float(x))


def _params_json(params: dict) -> str:
    return json.dumps(params, sort_keys=True, default=float)


def write_reports_csv(path, reports) -> None:
    rows = []
    for r in reports:
        rows.append((r.inequality_id, r.function_id, _params_json(r.params),
                     _fmt(r.lhs), _fmt(r.rhs), _fmt(r.ratio), _fmt(r.budget),
                     r.verdict, r.truncation))
    rows.sort()
    with open(path, "w") as fh:
        fh.write("inequality_id,function_id,params_json,lhs,rhs,ratio,budget,verdict,truncation\n")
        for row in rows:
            quoted = row[2].replace('"', '""')
            fh.write(f'{row[0]},{row[1]},"{quoted}",{row[3]},{row[4]},{row[5]},'
                     f"{row[6]},{row[7]},{row[8]}\n")


def write_traces_csv(path, traces) -> None:
    rows = []
    for tr in traces:
        rows.extend(tr.to_rows())
    rows.sort(key=lambda r: (r[0], r[1], r[3]))
    with open(path, "w") as fh:
        fh.write("trace_id,function_id,param_name,param_value,value,target,gap\n")
        for tid, fid, pn, pv, v, tgt, gap in rows:
            fh.write(f"{tid},{fid},{pn},{_fmt(pv)},{_fmt(v)},{_fmt(tgt)},{_fmt(gap)}\n")


def write_gauge_csv(path, rows) -> None:
    rows = sorted(rows)
    with open(path, "w") as fh:
        fh.write("function_id,order,t,axis,mu,u,achieved_measure,projection_measure\n")
        for fid, order, t, j, mu, u, ach, pm in rows:
            fh.write(f"{fid},{order},{_fmt(t)},{j},{_fmt(mu)},{_fmt(u)},"
                     f"{_fmt(ach)},{_fmt(pm)}\n")


def summarize(reports) -> str:
    agg: dict[str, dict] = {}
    for r in reports:
        a = agg.setdefault(r.inequality_id, {"n": 0, "pass": 0, "fail": 0,
                                             "degenerate": 0, "worst": 0.0,
                                             "budget": 0.0})
        a["n"] += 1
        a[r.verdict] += 1
        if math.isfinite(r.ratio):
            a["worst"] = max(a["worst"], r.ratio)
        a["budget"] = max(a["budget"], r.budget if math.isfinite(r.budget) else 0.0)
    lines = [f"{'inequality':32} {'n':>5} {'pass':>5} {'fail':>5} {'degen':>5} "
             f"{'worst_ratio':>12} {'budget':>10}"]
    for iid in sorted(agg):
        a = agg[iid]
        lines.append(f"{iid:32} {a['n']:>5} {a['pass']:>5} {a['fail']:>5} "
                     f"{a['degenerate']:>5} {a['worst']:>12.6g} {a['budget']:>10.6g}")
    return "\n".join(lines) + "\n"


_PLOT_SCRIPT = """# gnuplot script over the emitted CSV data
set datafile separator ','
set key autotitle columnhead
set logscale y
plot 'traces.csv' using 4:5 with linespoints title 'trace values'
"""


def _emit(outdir, result: ExperimentResult) -> None:
    os.makedirs(outdir, exist_ok=True)
    write_reports_csv(os.path.join(outdir, "reports.csv"), result.reports)
    if result.traces:
        write_traces_csv(os.path.join(outdir, "traces.csv"), result.traces)
    if result.gauge_rows:
        write_gauge_csv(os.path.join(outdir, "gauge.csv"), result.gauge_rows)
    with open(os.path.join(outdir, "summary.txt"), "w") as fh:
        fh.write(summarize(result.reports))
    with open(os.path.join(outdir, "plot.gp"), "w") as fh:
        fh.write(_PLOT_SCRIPT)


def _threads(args, cfg) -> int:
    if args.threads is not None:
        return args.threads
    cfg_t = _cfg_scalar(cfg, "threads")
    if cfg_t is not None:
        return int(cfg_t)
    env = os.environ.get("AGF_THREADS")
    return int(env) if env else 1


def _common_opts(args, cfg) -> dict:
    opts = {}
    m_max = args.m_max if getattr(args, "m_max", None) is not None \
        else _cfg_scalar(cfg, "m-max")
    if m_max is not None:
        opts["m_max"] = int(m_max)
    if getattr(args, "explore_open_case", False):
        opts["explore_open_case"] = True
    return opts


def cmd_corpus(args, cfg) -> int:
    corpus = default_corpus(args.seed)
    os.makedirs(args.out, exist_ok=True)
    rows = []
    for fid, f in corpus:
        path = os.path.join(args.out, f"{fid}.agf")
        save_agf(f, path)
        rows.append((fid, f.dims, "x".join(str(s) for s in f.shape),
                     f.support_cells, os.path.basename(path)))
    with open(os.path.join(args.out, "manifest.csv"), "w") as fh:
        fh.write("function_id,dims,shape,support_cells,file\n")
        for row in rows:
            fh.write(",".join(str(x) for x in row) + "\n")
    print(f"wrote {len(corpus)} members to {args.out}")
    print(f"corpus hash: {corpus_hash(corpus)}")
    return 0


_BUDGET_EXPERIMENTS = ("rearr-estimate", "aniso-estimate", "embedding",
                       "limit-sweep", "bbm")


def cmd_calibrate(args, cfg) -> int:
    corpus = default_corpus(args.seed)
    threads = _threads(args, cfg)
    opts = _common_opts(args, cfg)
    result = ExperimentResult()
    for name in _BUDGET_EXPERIMENTS:
        result.extend(run_experiment(name, corpus, budgets=None,
                                     threads=threads, opts=opts))
    margin = float(_cfg_scalar(cfg, "margin", DEFAULT_MARGIN))
    bf = calibrate_from_reports(result.reports, corpus_hash(corpus), margin)
    save_budgets(bf, args.budget, force=args.force)
    print(f"calibrated {len(bf.budgets)} budgets -> {args.budget}")
    for k in sorted(bf.budgets):
        print(f"  {k:32} max_ratio={bf.max_ratios[k]:.6g} budget={bf.budgets[k]:.6g}")
    return 0


def cmd_run(args, cfg) -> int:
    corpus = default_corpus(args.seed)
    budgets = None
    needs_budget = args.experiment == "all" or args.experiment in _BUDGET_EXPERIMENTS
    if args.budget and os.path.exists(args.budget):
        budgets = load_budgets(args.budget)
        budgets.check_corpus(corpus_hash(corpus))
    elif needs_budget:
        print("error: budget file required for calibrated experiments "
              "(run `agf calibrate` first)", file=sys.stderr)
        return 2
    threads = _threads(args, cfg)
    opts = _common_opts(args, cfg)
    result = run_experiment(args.experiment, corpus, budgets=budgets,
                            threads=threads, opts=opts)
    _emit(args.out, result)
    summary = summarize(result.reports)
    print(summary, end="")
    nfail = sum(1 for r in result.reports if r.verdict == "fail")
    if nfail:
        print(f"{nfail} failing reports", file=sys.stderr)
        return 1
    return 0


def cmd_report(args, cfg) -> int:
    path = os.path.join(args.out, "reports.csv")
    if not os.path.exists(path):
        print(f"error: {path} not found", file=sys.stderr)
        return 2
    import csv as _csv

    nfail = 0
    agg: dict[str, list] = {}
    with open(path, newline="") as fh:
        for row in _csv.DictReader(fh):
            a = agg.setdefault(row["inequality_id"], [0, 0, 0.0])
            a[0] += 1
            if row["verdict"] == "fail":
                a[1] += 1
                nfail += 1
            try:
                a[2] = max(a[2], float(row["ratio"]))
            except ValueError:
                pass
    print(f"{'inequality':32} {'n':>5} {'fail':>5} {'worst_ratio':>12}")
    for iid in sorted(agg):
        n, f, w = agg[iid]
        print(f"{iid:32} {n:>5} {f:>5} {w:>12.6g}")
    return 1 if nfail else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="agf",
        description="Verification experiments for rearrangement and embedding estimates")
    parser.add_argument("--config", help="flat key=value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="corpus seed")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (or AGF_THREADS)")
        p.add_argument("--budget", default=None, help="budget file path")
        p.add_argument("--m-max", dest="m_max", type=int, default=None,
                       help="dyadic depth for limit experiments")
        p.add_argument("--explore-open-case", action="store_true",
                       help="log ratios for theta_j < p without verdicts")

    p_corpus = sub.add_parser("corpus", help="write the committed corpus")
    common(p_corpus)
    p_corpus.set_defaults(func=cmd_corpus)

    p_cal = sub.add_parser("calibrate", help="freeze inequality budgets")
    common(p_cal)
    p_cal.add_argument("--force", action="store_true", help="overwrite an existing budget file")
    p_cal.set_defaults(func=cmd_calibrate)

    p_run = sub.add_parser("run", help="run one experiment or 'all'")
    p_run.add_argument("experiment", choices=EXPERIMENTS + ("all",))
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_rep = sub.add_parser("report", help="summarize written reports")
    common(p_rep)
    p_rep.set_defaults(func=cmd_report)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    cfg = {}
    if args.config:
        try:
            cfg = parse_config(args.config)
        except (AgfError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    if args.seed is None:
        args.seed = int(_cfg_scalar(cfg, "seed", _DEFAULT_SEED))
    if args.budget is None:
        args.budget = _cfg_scalar(cfg, "budget") or os.path.join("calibration", "budgets.json")
    try:
        return args.func(args, cfg)
    except AgfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
