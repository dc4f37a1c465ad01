from services.dk import dk_groupoid, generators, verify_simplicial_groupoid
from utils.documents import load
from utils.reports import Report

from .common import table


def register(sub) -> None:
    p = sub.add_parser("gk", help="the free simplicial groupoid G(K) and its identity check")
    p.add_argument("file")
    p.add_argument("--max-dim", type=int, help="top groupoid dimension (default: one below the input)")
    p.set_defaults(handler=gk, command="gk")


def gk(args, budget) -> Report:
    k = load(args.file, "sset")
    top = args.max_dim if args.max_dim is not None else k.max_dim - 1
    g = dk_groupoid(k, top)
    report = verify_simplicial_groupoid(g, top)
    rows = [dict(row, dim=n) for n in range(top + 1) for row in generators(g, n)]
    witness = report.failures[0] if report.failures else None
    return Report(
        args.command,
        report.ok,
        {"max_dim": top},
        witness,
        {
            "objects": list(g.objects),
            "generators": {str(n): sorted(g.generators[n]) for n in range(top + 1)},
            "checked": report.checked,
        },
        preview=table(rows),
    )
