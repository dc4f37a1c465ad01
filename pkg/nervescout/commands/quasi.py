from services.cat_core import SegalWitness, category_from_segal, segal_map
from services.quasi import ho_category, is_kan, is_quasicategory
from utils.documents import fincat_to_payload, load
from utils.reports import Report

from .common import max_dim, table, write_out


def register(sub) -> None:
    for name, handler, text in (
        ("kan", kan, "check every horn of dimension <= max-dim has a filler"),
        ("quasi", quasi, "check every inner horn of dimension <= max-dim has a filler"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("file")
        p.add_argument("--max-dim", type=int)
        p.set_defaults(handler=handler, command=name)

    h = sub.add_parser("ho", help="homotopy category of a quasi-category")
    h.add_argument("file")
    h.add_argument("--assume-quasi", action="store_true")
    h.add_argument("--out")
    h.set_defaults(handler=ho, command="ho")

    s = sub.add_parser("segalmap", help="the Segal map of a simplicial set in one degree")
    s.add_argument("file")
    s.add_argument("--p", type=int, default=2)
    s.set_defaults(handler=segalmap, command="segalmap")

    f = sub.add_parser("fromsegal", help="recover a category from a strict Segal simplicial set")
    f.add_argument("file")
    f.add_argument("--out")
    f.set_defaults(handler=fromsegal, command="fromsegal")


def _horns(args, budget, check) -> Report:
    x = load(args.file, "sset")
    top = max_dim(args, x.max_dim)
    v = check(x, top, budget)
    witness = v.witness.to_json() if v.witness is not None else None
    return Report(args.command, v.holds, {"max_dim": top}, witness)


def kan(args, budget) -> Report:
    return _horns(args, budget, is_kan)


def quasi(args, budget) -> Report:
    return _horns(args, budget, is_quasicategory)


def ho(args, budget) -> Report:
    x = load(args.file, "sset")
    c = ho_category(x, assume_quasi=args.assume_quasi, budget=budget)
    write_out(args, "fincat", c)
    return Report(args.command, bounds={"max_dim": x.max_dim}, result=fincat_to_payload(c))


def segalmap(args, budget) -> Report:
    x = load(args.file, "sset")
    m = segal_map(x, args.p)
    rows, witness = [], None
    for spine, found in sorted(m.preimages().items()):
        rows.append({"spine": " ".join(r.key for r in spine), "preimages": " ".join(r.key for r in found) or "-"})
        if witness is None and len(found) != 1:
            kind = "not_surjective" if not found else "not_injective"
            witness = SegalWitness(args.p, kind, spine, tuple(sorted(found))).to_json()
    return Report(
        args.command,
        witness is None,
        {"p": args.p},
        witness,
        {"spines": len(rows)},
        preview=table(rows),
    )


def fromsegal(args, budget) -> Report:
    x = load(args.file, "sset")
    c = category_from_segal(x)
    write_out(args, "fincat", c)
    return Report(args.command, bounds={"max_dim": x.max_dim}, result=fincat_to_payload(c))
