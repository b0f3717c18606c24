"""Command line front end.

    localdual run CONFIG [--out DIR] [--plots]
    localdual verify [--json]
    localdual rate RECORDS [--field gap]
    localdual report RECORDS [--out DIR]

`run` executes the grid in a JSON config and writes metrics.csv /
metrics.json (and figures with --plots or output.plots in the config).
Exit status is 0 only when every cell completed. `verify` runs the
built-in verification battery; `rate` fits geometric rates on saved records;
`report` renders figures from saved records.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import LocaldualError, ValidationError
from .harness import (emit_metrics, fit_geometric_rate, load_config,
                      load_records, run_experiment, verification_suite)


def _cmd_run(args):
    cfg = load_config(args.config)
    records = run_experiment(cfg)
    out_dir = args.out or cfg.output.get("dir", ".")
    formats = cfg.output.get("formats", ["csv", "json"])
    paths = emit_metrics(records, out_dir=out_dir, formats=formats)
    if args.plots or cfg.output.get("plots"):
        from .report import render_report  # lazy: pulls in matplotlib
        paths.update(render_report(records, out_dir=out_dir))
    ok = True
    for rec in records:
        final_gap = ""
        if rec.rows and rec.rows[-1].gap is not None:
            final_gap = " final_gap=%.3e" % rec.rows[-1].gap
        print("%-14s seed=%-4d status=%-16s rows=%d%s"
              % (rec.algorithm, rec.master_seed, rec.status, len(rec.rows), final_gap))
        ok = ok and rec.status == "ok"
    for name, path in sorted(paths.items()):
        print("wrote %s: %s" % (name, path))
    return 0 if ok else 1


def _cmd_verify(args):
    checks = verification_suite()
    if args.json:
        print(json.dumps(checks, indent=1))
    else:
        for c in checks:
            print("[%s] %s%s" % ("PASS" if c["passed"] else "FAIL", c["name"],
                                 (": " + c["detail"]) if c["detail"] else ""))
    return 0 if all(c["passed"] for c in checks) else 1


def _cmd_rate(args):
    records = load_records(args.records)
    failures = 0
    for rec in records:
        series = rec.series(args.field)
        series = series[np.isfinite(series)]
        try:
            rate, r2 = fit_geometric_rate(series)
            print("%-14s seed=%-4d %s rate=%.6f r2=%.6f"
                  % (rec.algorithm, rec.master_seed, args.field, rate, r2))
        except ValidationError as exc:
            failures += 1
            print("%-14s seed=%-4d %s rate=- (%s)"
                  % (rec.algorithm, rec.master_seed, args.field, exc))
    return 0 if failures == 0 else 1


def _cmd_report(args):
    from .report import render_report
    records = load_records(args.records)
    paths = render_report(records, out_dir=args.out)
    for name, path in sorted(paths.items()):
        print("wrote %s: %s" % (name, path))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="localdual",
                                 description="primal-dual local-update simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment grid from a JSON config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--plots", action="store_true", help="also render figures")
    p_run.set_defaults(fn=_cmd_run)

    p_ver = sub.add_parser("verify", help="run the built-in verification battery")
    p_ver.add_argument("--json", action="store_true")
    p_ver.set_defaults(fn=_cmd_verify)

    p_rate = sub.add_parser("rate", help="fit geometric rates on saved records")
    p_rate.add_argument("records")
    p_rate.add_argument("--field", default="gap")
    p_rate.set_defaults(fn=_cmd_rate)

    p_rep = sub.add_parser("report", help="render figures from saved records")
    p_rep.add_argument("records")
    p_rep.add_argument("--out", default=".")
    p_rep.set_defaults(fn=_cmd_report)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except LocaldualError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
