"""Command line interface.

Subcommands: ``gen`` (write an instance file), ``check`` (run one criterion),
``equiv`` (run a panel of criteria and report cross-agreement), ``shrink``
(minimize a stored witness).  Exit codes: 0 all checks passed, 1 a violation
was found, 2 inconclusive, 3 usage or data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .campaign import (
    ALL_CRITERIA,
    DOMINATION_CRITERIA,
    EXIT_ERROR,
    EXIT_INCONCLUSIVE,
    EXIT_PASS,
    EXIT_VIOLATION,
    CampaignConfig,
    run_campaign,
    save_report,
    shrink_witness,
    witness_margin,
)
from .errors import DomLabError
from .instances import KINDS, Instance, gen_instance
from .verdicts import Witness


def _parse_t_grid(text: str) -> list:
    """``log:<lo>:<hi>:<n>`` or a comma-separated list of times."""
    if text.startswith("log:"):
        _, lo, hi, n = text.split(":")
        return [float(lo), float(hi), int(n)]
    values = [float(x) for x in text.split(",")]
    if len(values) < 2:
        raise ValueError("explicit t grids need at least two times")
    return [min(values), max(values), len(values)]


def _status_exit(status: str) -> int:
    return {"pass": EXIT_PASS, "violation": EXIT_VIOLATION,
            "inconclusive": EXIT_INCONCLUSIVE,
            "precondition_failed": EXIT_INCONCLUSIVE}.get(status, EXIT_ERROR)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="domlab",
                                description="domination laboratory for form semigroups")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--kind", required=True, choices=KINDS)
    g.add_argument("--blocks", type=str, default=None,
                   help="comma-separated block sizes, e.g. --blocks 2,1,1")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--eps", type=float, default=None,
                   help="perturbation size for perturbed_pair")
    g.add_argument("--params", type=str, default=None, help="extra parameters as JSON")
    g.add_argument("-o", "--output", required=True)

    c = sub.add_parser("check", help="run one criterion on an instance file")
    c.add_argument("instance")
    c.add_argument("--criterion", required=True, choices=ALL_CRITERIA)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--tol", type=float, default=1e-8)
    c.add_argument("--t-grid", type=str, default="log:1e-3:10:13")
    c.add_argument("--theta-grid", type=int, default=64)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--witness-out", type=str, default=None,
                   help="write the worst witness as JSON")

    e = sub.add_parser("equiv", help="run a criteria panel and cross-tabulate verdicts")
    e.add_argument("instance", nargs="+")
    e.add_argument("--all", action="store_true", help="run every domination criterion")
    e.add_argument("--criteria", type=str, default=None, help="comma-separated criteria")
    e.add_argument("--samples", type=int, default=1000)
    e.add_argument("--tol", type=float, default=1e-8)
    e.add_argument("--t-grid", type=str, default="log:1e-3:10:13")
    e.add_argument("--theta-grid", type=int, default=64)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--report", type=str, default=None, help="write the full report JSON")

    s = sub.add_parser("shrink", help="minimize a stored witness")
    s.add_argument("instance")
    s.add_argument("--witness", required=True, help="witness JSON written by check")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("-o", "--output", default=None, help="write the shrunk witness")
    return p


def _cmd_gen(args) -> int:
    params = json.loads(args.params) if args.params else {}
    if args.eps is not None:
        params["eps"] = args.eps
    if args.blocks is not None:
        blocks = [int(b) for b in args.blocks.replace(" ", "").split(",") if b]
        if args.kind in ("commutative_random", "perturbed_pair"):
            if any(b != 1 for b in blocks):
                raise DomLabError(f"kind {args.kind!r} is commutative; blocks must all be 1")
            params.setdefault("d", len(blocks))
        else:
            params.setdefault("blocks", blocks)
    inst = gen_instance(args.kind, params, args.seed)
    inst.save(args.output)
    print(f"wrote {args.kind} instance on blocks {list(inst.space.blocks)} to {args.output}")
    return EXIT_PASS


def _campaign_config(args, instances, criteria) -> CampaignConfig:
    return CampaignConfig(
        instances=instances,
        criteria=criteria,
        samples=args.samples,
        tol=args.tol,
        t_grid=_parse_t_grid(args.t_grid),
        theta_points=args.theta_grid,
        seed=args.seed,
    )


def _cmd_check(args) -> int:
    config = _campaign_config(args, [args.instance], [args.criterion])
    report = run_campaign(config)
    entry = report["results"]["instance_000"]["criteria"][args.criterion]
    margin = entry.get("margin")
    margin_txt = "n/a" if margin is None or margin != margin else f"{margin:.3e}"
    print(f"{args.criterion}: {entry['status']} (worst margin {margin_txt}, "
          f"{entry['samples']} samples)")
    for note in entry.get("notes", []):
        print(f"  note: {note}")
    if entry.get("witness") and entry["status"] == "violation":
        w = entry["witness"]
        loc = ", ".join(f"{k}={w[k]}" for k in ("t", "theta") if w.get(k) is not None)
        print(f"  witness at sample {w.get('index')}" + (f" ({loc})" if loc else ""))
        if args.witness_out:
            doc = dict(w, criterion=args.criterion)
            Path(args.witness_out).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
            print(f"  witness written to {args.witness_out}")
    return _status_exit(entry["status"])


def _cmd_equiv(args) -> int:
    if args.all or not args.criteria:
        criteria = [c for c in DOMINATION_CRITERIA if c != "oracle"]
    else:
        criteria = [c.strip() for c in args.criteria.split(",")]
    config = _campaign_config(args, list(args.instance), criteria)
    report = run_campaign(config)
    for key in sorted(report["results"]):
        entry = report["results"][key]
        eq = report["equivalence"][key]
        print(f"{key} ({entry['kind']}, blocks {entry['blocks']}): "
              f"{'unanimous' if eq['unanimous'] else 'DISAGREEMENT'}")
        for crit in criteria:
            v = entry["criteria"][crit]
            print(f"  {crit:<22s} {v['status']}")
    if report.get("vii_probe"):
        print(f"vii probe: {report['vii_probe']['finding']}")
    if args.report:
        save_report(report, args.report)
        print(f"report written to {args.report}")
    return report["summary"]["exit_code"]


def _cmd_shrink(args) -> int:
    inst = Instance.load(args.instance)
    doc = json.loads(Path(args.witness).read_text())
    criterion = doc.get("criterion", "direct")
    vectors = {}
    for k, v in doc.get("vectors", {}).items():
        if k not in ("u", "v"):
            continue
        arr = np.asarray(v, dtype=float)
        if arr.ndim == 2 and arr.shape[-1] == 2:
            arr = arr[..., 0] + 1j * arr[..., 1]
        vectors[k] = arr.astype(complex)
    w = Witness(vectors=vectors, margin=float(doc.get("margin", 0.0)),
                index=doc.get("index"), t=doc.get("t"), theta=doc.get("theta"))
    initial = witness_margin(inst, criterion, w)
    shrunk = shrink_witness(inst, criterion, w, tol=args.tol)
    if shrunk.margin >= -args.tol and initial >= -args.tol:
        print(f"witness margin {initial:.3e} is not a violation at tol {args.tol:g}; "
              "nothing to shrink")
        return EXIT_INCONCLUSIVE
    nnz = {k: int(np.count_nonzero(np.abs(v) > 1e-14)) for k, v in shrunk.vectors.items()}
    print(f"shrunk witness margin {shrunk.margin:.3e} "
          f"(was {initial:.3e}); nonzero coordinates {nnz}")
    if args.output:
        out = shrunk.to_dict()
        out["criterion"] = criterion
        Path(args.output).write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
        print(f"written to {args.output}")
    return EXIT_VIOLATION


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "equiv":
            return _cmd_equiv(args)
        if args.command == "shrink":
            return _cmd_shrink(args)
    except (DomLabError, FileNotFoundError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
