import json
from pathlib import Path

from services.segal import (
    HomotopyCertificate,
    NSSetMap,
    as_segal_precat,
    bisimplicial_segal_check,
    delta_to_gamma,
    gamma_compose,
    gamma_map,
    ho_of_segal,
    n_equivalence_check,
    truncate_iter,
)
from utils.documents import fincat_to_payload, load, nsset_to_payload, parse_index
from utils.errors import DocumentError, InvalidInput
from utils.reports import Report

from .common import write_out


def register(sub) -> None:
    s = sub.add_parser("segal", help="Segal precategories given as bisimplicial sets")
    actions = s.add_subparsers(dest="action", required=True)

    c = actions.add_parser("check", help="strict / certified / unknown verdict for each Segal map")
    c.add_argument("file")
    c.add_argument("--max-p", type=int, default=3)
    c.add_argument("--certificate", action="append", default=[], help="homotopy certificate JSON (repeatable)")
    c.set_defaults(handler=segal_check, command="segal check")

    h = actions.add_parser("ho", help="the homotopy category of a Segal precategory")
    h.add_argument("file")
    h.add_argument("--certificate", action="append", default=[])
    h.add_argument("--out")
    h.set_defaults(handler=segal_ho, command="segal ho")

    g = sub.add_parser("gamma", help="Γ-map algebra")
    ga = g.add_subparsers(dest="action", required=True)
    gc = ga.add_parser("compose", help="compose two Γ-maps")
    gc.add_argument("first")
    gc.add_argument("second")
    gc.set_defaults(handler=gamma_compose_cmd, command="gamma compose")
    gd = ga.add_parser("fromdelta", help="the Γ-map of a monotone map [m] → [n]")
    gd.add_argument("images", help="comma separated images f(0),...,f(m)")
    gd.add_argument("--n", type=int, required=True)
    gd.set_defaults(handler=gamma_fromdelta, command="gamma fromdelta")

    t = sub.add_parser("truncate", help="isomorphism-class truncation of an n-precategory")
    t.add_argument("file")
    t.add_argument("--times", type=int, default=1)
    t.add_argument("--out")
    t.set_defaults(handler=truncate_cmd, command="truncate")

    e = sub.add_parser("nequiv", help="check a map of n-precategories is an n-equivalence")
    e.add_argument("source")
    e.add_argument("target")
    e.add_argument("map", help='JSON object {"tables": {"p,q": {elem: elem}}}')
    e.add_argument("--n", type=int, required=True)
    e.set_defaults(handler=nequiv, command="nequiv")


def _json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(f"syntax error: {exc.msg}", position=(exc.lineno, exc.colno)) from None


def read_certificate(path: str) -> HomotopyCertificate:
    """{"p": P, "inverse": {"q": [{"spine": [...], "simplex": key}]}, "homotopy": {"q,j": {key: key}}}."""

    obj = _json(path)
    try:
        inverse = {
            int(q): {tuple(e["spine"]): e["simplex"] for e in entries} for q, entries in obj["inverse"].items()
        }
        homotopy = {tuple(int(v) for v in k.split(",")): dict(t) for k, t in obj["homotopy"].items()}
        return HomotopyCertificate(int(obj["p"]), inverse, homotopy)
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"malformed certificate: {exc}") from None


def _certificates(paths) -> dict:
    return {c.p: c for c in map(read_certificate, paths)}


def segal_check(args, budget) -> Report:
    a = load(args.file, "bisset")
    verdicts = bisimplicial_segal_check(a, min(args.max_p, a.max_p), _certificates(args.certificate), budget)
    unknown = next((v for v in verdicts if v.status == "unknown"), None)
    witness = dict(unknown.witness, p=unknown.p) if unknown else None
    return Report(
        args.command,
        unknown is None,
        {"max_p": min(args.max_p, a.max_p), "max_q": a.max_q},
        witness,
        {"verdicts": [v.to_json() for v in verdicts]},
    )


def segal_ho(args, budget) -> Report:
    a = as_segal_precat(load(args.file, "bisset"))
    c = ho_of_segal(a, _certificates(args.certificate))
    write_out(args, "fincat", c)
    return Report(args.command, bounds={"max_p": a.bisset.max_p}, result=fincat_to_payload(c))


def _gamma(path: str):
    obj = _json(path)
    try:
        return gamma_map(obj["source"], obj["target"], obj["theta"])
    except (KeyError, TypeError) as exc:
        raise DocumentError(f"malformed Γ-map: {exc}") from None


def gamma_compose_cmd(args, budget) -> Report:
    out = gamma_compose(_gamma(args.first), _gamma(args.second))
    return Report(args.command, result=out.to_json())


def gamma_fromdelta(args, budget) -> Report:
    try:
        images = [int(v) for v in args.images.split(",")]
    except ValueError:
        raise InvalidInput(f"images {args.images!r} must be comma separated integers") from None
    return Report(args.command, bounds={"m": len(images) - 1, "n": args.n}, result=delta_to_gamma(images, args.n).to_json())


def truncate_cmd(args, budget) -> Report:
    a = load(args.file, "nsset")
    if not 1 <= args.times <= a.arity:
        raise InvalidInput(f"an arity {a.arity} precategory can be truncated 1..{a.arity} times")
    result, tau = truncate_iter(a, args.times)
    write_out(args, "nsset", result)
    return Report(
        args.command,
        bounds={"arity": a.arity, "times": args.times},
        result={
            "truncation": nsset_to_payload(result),
            "tau": {",".join(map(str, m)): dict(t) for m, t in tau.items()},
        },
    )


def nequiv(args, budget) -> Report:
    src, dst = load(args.source, "nsset"), load(args.target, "nsset")
    obj = _json(args.map)
    if not isinstance(obj.get("tables"), dict):
        raise DocumentError("map documents need a tables object", path=["tables"])
    tables = {parse_index(k, ["tables", k]): dict(t) for k, t in obj["tables"].items()}
    f = NSSetMap(src, dst, tables).check()
    holds = n_equivalence_check(f, args.n)
    witness = None if holds else {"n": args.n, "reason": "a hom slice is not an equivalence or T^n(f) is not surjective"}
    return Report(args.command, holds, {"n": args.n}, witness)
