from services.cat_core import nerve
from services.simplicial_core import check_simplicial_identities
from utils.documents import load
from utils.reports import Report

from .common import max_dim, simplex_rows, table, write_out


def register(sub) -> None:
    p = sub.add_parser("sset", help="inspect a simplicial set document")
    actions = p.add_subparsers(dest="action", required=True)

    c = actions.add_parser("check", help="verify the simplicial identities")
    c.add_argument("file")
    c.set_defaults(handler=check, command="sset check")

    s = actions.add_parser("show", help="count and list nondegenerate simplices")
    s.add_argument("file")
    s.add_argument("--max-dim", type=int)
    s.set_defaults(handler=show, command="sset show")

    n = sub.add_parser("nerve", help="nerve of a finite category")
    n.add_argument("file")
    n.add_argument("--max-dim", type=int)
    n.add_argument("--out")
    n.set_defaults(handler=nerve_of, command="nerve")


def check(args, budget) -> Report:
    x = load(args.file, "sset")
    bad = check_simplicial_identities(x, all_simplices=True)
    witness = None
    if bad:
        s, i, j = bad[0]
        witness = {"simplex": s, "i": i, "j": j}
    return Report(args.command, not bad, {"max_dim": x.max_dim}, witness, {"failures": len(bad)})


def show(args, budget) -> Report:
    x = load(args.file, "sset")
    top = max_dim(args, x.max_dim)
    counts = {str(k): x.count(k) for k in range(min(top, x.max_dim) + 1)}
    nd = {str(k): len(x.nondegenerate(k)) for k in range(min(top, x.max_dim) + 1)}
    return Report(
        args.command,
        bounds={"max_dim": top},
        result={"name": x.name, "simplices": counts, "nondegenerate": nd},
        preview=table(simplex_rows(x, top)),
    )


def nerve_of(args, budget) -> Report:
    c = load(args.file, "fincat")
    top = max_dim(args)
    x = nerve(c, top)
    write_out(args, "sset", x)
    counts = {str(k): x.count(k) for k in range(top + 1)}
    return Report(args.command, bounds={"max_dim": top}, result={"simplices": counts}, preview=table(simplex_rows(x, top)))
