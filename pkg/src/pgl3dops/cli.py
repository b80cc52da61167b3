"""Command-line front end: batch verification, certification, exploration.

Subcommands:

* ``verify {all|cdv|vectorfields|d0|twists|casimir|cases|conics}`` runs the
  registered identity suites and prints one transcript line per check;
* ``certify --lambda L1 L2`` builds and re-validates a generation
  certificate for a concrete weight;
* ``concordance`` prints the formula-by-formula comparison against the
  reference display;
* ``op {print|apply|compose}`` parses operator text and exposes the engine.

Exit codes: 0 when nothing failed (mismatch-reported items are informational
and always listed), 1 when at least one check failed or a certificate left
unreachable points, 2 on usage errors.  JSON reports carry a schema_version
field and never include wall times, so identical invocations produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import certify as CERT
from . import checks as CK
from . import conics as CON
from . import pgl3 as P
from .ring import parse_ratfunc
from .weyl import op_apply, op_compose, parse_operator

CHARTS = {
    "matrix": P.MATRIX,
    "bminusb": P.BMINUSB,
    "big_cell": P.BIG,
    "ratio": P.RATIO,
    "conic": CON.CONIC,
    "conic_entry": CON.ENTRY,
    "conic_cone": CON.CONE,
}


def _write_json(path: str | None, payload: dict) -> None:
    if not path:
        return
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    with open(path, "w") as fh:
        fh.write(text)


def _cmd_verify(args) -> int:
    cfg = CK.CheckConfig(param_mode=args.param_mode, grid=args.grid,
                         nilpotency_limit=args.nilpotency_limit,
                         seed=args.seed)
    results = CK.run_suite(args.suite, cfg, jobs=args.jobs)
    print(CK.transcript(results))
    _write_json(args.json, CK.report_json(checks=results))
    return 1 if any(r.status == "fail" for r in results) else 0


def _cmd_certify(args) -> int:
    lam = (args.lam[0], args.lam[1])
    cert = CERT.certify(lam)
    problems = CERT.validate_certificate(cert)
    payload = CERT_report(cert, problems)
    print(_certificate_transcript(cert, problems))
    _write_json(args.json, payload)
    if problems or cert.status == "unreachable":
        return 1
    return 0


def CERT_report(cert, problems) -> dict:
    data = cert.to_json()
    data["checker_problems"] = problems
    return CK.report_json(certificates=[data])


def _certificate_transcript(cert, problems) -> str:
    lines = [f"lambda = {cert.lam}: {cert.status}, "
             f"module dimension {CERT.module_dimension(cert.lam)}"]
    if cert.status == "zero_module":
        lines.append("empty dominant support: the section space is zero")
    else:
        lines.append(f"support ({len(cert.support)} points): "
                     + ", ".join(f"m={p.m} nu=({p.nu1},{p.nu2})"
                                 for p in cert.support))
        lines.append(f"basepoint m={cert.basepoint}")
        for e in cert.edges:
            lines.append(f"  case {e.case}: {e.source} -> {e.target}  "
                         f"scalar {e.scalar}  [{e.closed_form}]")
        if cert.unreachable:
            lines.append(f"UNREACHABLE points: {cert.unreachable} "
                         "(this would contradict the irreducibility claim)")
    lines.append("checker: " + ("ok" if not problems else "; ".join(problems)))
    return "\n".join(lines)


def _cmd_concordance(args) -> int:
    items = CK.concordance_items()
    width = max(len(i["id"]) for i in items)
    for item in items:
        print(f"[{item['status']:>8}] {item['id']:<{width}}")
        if item["status"] == "mismatch":
            print(f"{'':11}reference: {item['reference']}")
            print(f"{'':11}engine:    {item['engine']}")
            print(f"{'':11}residual:  {item['residual']}")
    matched = sum(1 for i in items if i["status"] == "matched")
    print(f"{matched} of {len(items)} displayed formulas matched; "
          f"{len(items) - matched} mismatches reported")
    _write_json(args.json, CK.report_json(concordance=items))
    return 0


def _cmd_op(args) -> int:
    chart = CHARTS[args.chart]
    if args.action == "print":
        print(parse_operator(args.expr[0], chart).to_text())
    elif args.action == "compose":
        a = parse_operator(args.expr[0], chart)
        b = parse_operator(args.expr[1], chart)
        print(op_compose(a, b).to_text())
    elif args.action == "apply":
        a = parse_operator(args.expr[0], chart)
        f = parse_ratfunc(args.expr[1], chart.table)
        print(op_apply(a, f).to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pgl3dops",
        description="exact verification engine for global twisted differential "
                    "operators on the compactified PGL3")
    sub = parser.add_subparsers(dest="command", required=True)

    ver = sub.add_parser("verify", help="run a registered identity suite")
    ver.add_argument("suite", choices=["all"] + CK.suite_names())
    ver.add_argument("--param-mode", choices=("symbolic", "sampled"),
                     default="symbolic")
    ver.add_argument("--grid", type=int, default=4,
                     help="sampling range for grid checks (default 4)")
    ver.add_argument("--nilpotency-limit", type=int, default=12)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--jobs", type=int, default=1,
                     help="worker processes for independent checks")
    ver.add_argument("--json", metavar="PATH", help="write the JSON report here")
    ver.set_defaults(fn=_cmd_verify)

    cer = sub.add_parser("certify", help="build a generation certificate")
    cer.add_argument("--lambda", dest="lam", nargs=2, type=int, required=True,
                     metavar=("L1", "L2"))
    cer.add_argument("--json", metavar="PATH")
    cer.set_defaults(fn=_cmd_certify)

    con = sub.add_parser("concordance",
                         help="compare engine formulas with the reference display")
    con.add_argument("--json", metavar="PATH")
    con.set_defaults(fn=_cmd_concordance)

    op = sub.add_parser("op", help="parse, apply and compose operators")
    op.add_argument("action", choices=("print", "apply", "compose"))
    op.add_argument("expr", nargs="+",
                    help="operator text (and a second operator or function)")
    op.add_argument("--chart", choices=sorted(CHARTS), default="matrix")
    op.set_defaults(fn=_cmd_op)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "op":
        wanted = 2 if args.action in ("apply", "compose") else 1
        if len(args.expr) != wanted:
            print(f"op {args.action} expects {wanted} expression(s)",
                  file=sys.stderr)
            return 2
    try:
        return args.fn(args)
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
