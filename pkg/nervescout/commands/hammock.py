from typing import Optional

from services.cat_core import FinCat
from services.hammock import (
    LocPair,
    check_left_fractions,
    compose_hammocks,
    enumerate_hammocks,
    left_bias,
    make_locpair,
    normal_forms,
    reduce_hammock,
)
from utils.documents import load, load_hammock
from utils.errors import DocumentError
from utils.reports import Report

from .common import write_out


def register(sub) -> None:
    p = sub.add_parser("hammock", help="reduced hammocks of a category with weak equivalences")
    actions = p.add_subparsers(dest="action", required=True)

    r = actions.add_parser("reduce", help="reduce a hammock to normal form")
    r.add_argument("locpair")
    r.add_argument("hammock")
    r.add_argument("--out")
    r.set_defaults(handler=reduce, command="hammock reduce")

    e = actions.add_parser("enumerate", help="all reduced hammocks between two objects")
    e.add_argument("file", help="a locpair, or a fincat together with --weq")
    e.add_argument("--from", dest="x", required=True)
    e.add_argument("--to", dest="y", required=True)
    e.add_argument("--weq", help="comma-separated arrows generating W; replaces the document's W")
    e.add_argument("--width", type=int, default=0)
    e.add_argument("--max-len", type=int, default=3)
    e.set_defaults(handler=enumerate_, command="hammock enumerate")

    c = actions.add_parser("compose", help="juxtapose two hammocks of equal width and reduce")
    c.add_argument("locpair")
    c.add_argument("first")
    c.add_argument("second")
    c.add_argument("--out")
    c.set_defaults(handler=compose, command="hammock compose")

    b = actions.add_parser("leftbias", help="move a zigzag to the form X → C ← Y")
    b.add_argument("locpair")
    b.add_argument("hammock")
    b.add_argument("--max-steps", type=int, default=32)
    b.set_defaults(handler=leftbias, command="hammock leftbias")

    f = sub.add_parser("leftfrac", help="check the left calculus of fractions conditions")
    f.add_argument("locpair")
    f.set_defaults(handler=leftfrac, command="leftfrac")


def reduce(args, budget) -> Report:
    p = load(args.locpair, "locpair")
    h = load_hammock(args.hammock, p)
    out = reduce_hammock(h, p)
    write_out(args, "hammock", out)
    forms = normal_forms(h, p)
    return Report(
        args.command,
        bounds={"length": h.length, "width": h.width},
        result={"reduced": out.to_json(), "normal_forms": len(forms)},
    )


def enumerate_(args, budget) -> Report:
    p = locpair_with_weq(load(args.file), args.weq)
    found = enumerate_hammocks(p, args.x, args.y, args.width, args.max_len, budget)
    return Report(
        args.command,
        bounds={"width": args.width, "max_len": args.max_len},
        result={"count": len(found), "hammocks": [h.to_json() for h in found]},
    )


def compose(args, budget) -> Report:
    p = load(args.locpair, "locpair")
    out = compose_hammocks(load_hammock(args.first, p), load_hammock(args.second, p), p)
    write_out(args, "hammock", out)
    return Report(args.command, bounds={"width": out.width}, result=out.to_json())


def leftbias(args, budget) -> Report:
    p = load(args.locpair, "locpair")
    res = left_bias(load_hammock(args.hammock, p), p, args.max_steps)
    return Report(
        args.command,
        bounds={"max_steps": args.max_steps},
        result={"zigzag": res.zigzag.to_json(), "steps": [s.to_json() for s in res.steps]},
    )


def leftfrac(args, budget) -> Report:
    p = load(args.locpair, "locpair")
    v = check_left_fractions(p, budget)
    witness = dict(v.witness, condition=v.condition) if not v.holds else None
    return Report(args.command, v.holds, {"arrows": len(p.c.arrows)}, witness)


def locpair_with_weq(doc, weq: Optional[str]) -> LocPair:
    """The document's pair, with W regenerated from --weq when it is given."""

    arrows = [a.strip() for a in weq.split(",") if a.strip()] if weq is not None else None
    if isinstance(doc, LocPair):
        return doc if arrows is None else make_locpair(doc.c, arrows)
    if isinstance(doc, FinCat):
        return make_locpair(doc, arrows or [])
    raise DocumentError("expected a locpair or fincat document", path=["kind"])
