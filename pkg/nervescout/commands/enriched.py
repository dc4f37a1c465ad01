from services.enriched import interchange_square, pi0_category, s_ordinal, s_resolution
from services.hc_nerve import hc_nerve, hc_nerve_is_quasi
from utils.documents import fincat_to_payload, load
from utils.errors import InvalidInput
from utils.reports import Report

from .common import max_dim, simplex_rows, table, write_out


def register(sub) -> None:
    s = sub.add_parser("sres", help="a hom complex of the simplicial resolution of [N] or of a category")
    s.add_argument("n", type=int)
    s.add_argument("--hom", nargs=2, metavar=("I", "J"))
    s.add_argument("--fincat", help="resolve this category instead of the ordinal [N]")
    s.add_argument("--max-dim", type=int)
    s.set_defaults(handler=sres, command="sres")

    i = sub.add_parser("interchange", help="the cube facet of S[n](0,n) missed by every coface")
    i.add_argument("--n", type=int, default=4)
    i.set_defaults(handler=interchange, command="interchange")

    p = sub.add_parser("pi0", help="the category of components of an S-category")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(handler=pi0, command="pi0")

    h = sub.add_parser("hcnerve", help="homotopy coherent nerve, optionally with its inner horn check")
    h.add_argument("file")
    h.add_argument("--max-dim", "--dim", type=int, dest="max_dim")
    h.add_argument("--check-quasi", action="store_true", help="check inner horn filling up to the dimension")
    h.add_argument("--out")
    h.set_defaults(handler=hcnerve, command="hcnerve")


def sres(args, budget) -> Report:
    top = max_dim(args)
    if args.fincat:
        b = s_resolution(load(args.fincat, "fincat"), top)
        x, y = args.hom or (b.objects[0], b.objects[-1])
    else:
        if args.n < 0:
            raise InvalidInput("the ordinal [N] needs N >= 0")
        b = s_ordinal(args.n, top)
        x, y = args.hom or ("0", str(args.n))
    if (x, y) not in b.homs:
        raise InvalidInput(f"hom({x},{y}) is empty or unknown")
    h = b.hom(x, y)
    rows = simplex_rows(h, top)
    return Report(
        args.command,
        bounds={"max_dim": top},
        result={"hom": [x, y], "simplices": rows},
        preview=table(rows),
    )


def interchange(args, budget) -> Report:
    sq = interchange_square(args.n)
    result = {
        "cofaces": {str(i): list(f) for i, f in sorted(sq.facets.items())},
        "remaining": [list(f) for f in sq.remaining],
    }
    if sq.corners:
        result.update({"corners": list(sq.corners), "edges": [list(e) for e in sq.edges], "face": sq.face})
    return Report(args.command, bounds={"n": args.n}, result=result)


def pi0(args, budget) -> Report:
    b = load(args.file, "scat")
    c = pi0_category(b)
    write_out(args, "fincat", c)
    return Report(args.command, bounds={"max_dim": b.max_dim}, result=fincat_to_payload(c))


def hcnerve(args, budget) -> Report:
    b = load(args.file, "scat")
    top = max_dim(args, b.max_dim + 1)
    if not args.check_quasi:
        x = hc_nerve(b, top, budget)
        write_out(args, "sset", x)
        counts = {str(k): x.count(k) for k in range(top + 1)}
        return Report(args.command, bounds={"max_dim": top}, result={"simplices": counts})
    v = hc_nerve_is_quasi(b, top, budget)
    if args.out:
        write_out(args, "sset", hc_nerve(b, top, budget))
    witness = v.witness.to_json() if v.witness is not None else None
    return Report(args.command, v.holds, {"max_dim": top}, witness, {"locally_kan": v.locally_kan})
