"""JSON documents: envelope parsing, schema validation and codecs per kind."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match

from services.cat_core import FinCat, make_category
from services.enriched import SCat
from services.hammock import Hammock, LocPair, check_hammock, make_locpair
from services.segal import BiSSet, NSSet
from services.simplicial_core import SMap, SSet, SimplexRef, product
from utils.errors import DocumentError, InvalidInput

logger = logging.getLogger("documents")

FORMAT_VERSION = 1
KINDS = ("sset", "fincat", "scat", "bisset", "nsset", "hammock", "locpair")


@dataclass(frozen=True)
class Document:
    kind: str
    format_version: int
    payload: Dict[str, Any]


# ---------- Schemas ----------

_ID = {"type": "string", "minLength": 1}
_REF = {
    "type": "object",
    "properties": {"base": _ID, "degens": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
    "required": ["base", "degens"],
    "additionalProperties": False,
}
_ID_LIST = {"type": "array", "items": _ID}

ENVELOPE_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": list(KINDS)},
        "format_version": {"const": FORMAT_VERSION},
        "payload": {"type": "object"},
    },
    "required": ["kind", "format_version", "payload"],
    "additionalProperties": False,
}

SSET_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "max_dim": {"type": "integer", "minimum": 0},
        "nd": {"type": "array", "items": _ID_LIST},
        "faces": {"type": "object", "additionalProperties": {"type": "array", "items": _REF}},
    },
    "required": ["max_dim", "nd", "faces"],
    "additionalProperties": False,
}

FINCAT_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "objects": _ID_LIST,
        "arrows": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"id": _ID, "dom": _ID, "cod": _ID},
                "required": ["id", "dom", "cod"],
                "additionalProperties": False,
            },
        },
        "identities": {"type": "object", "additionalProperties": _ID},
        "comp": {"type": "object", "additionalProperties": _ID},
    },
    "required": ["objects", "arrows", "identities", "comp"],
    "additionalProperties": False,
}

SCAT_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "max_dim": {"type": "integer", "minimum": 0},
        "objects": _ID_LIST,
        "homs": {"type": "object", "additionalProperties": SSET_SCHEMA},
        "comp": {"type": "object", "additionalProperties": {"type": "object", "additionalProperties": _REF}},
        "ids": {"type": "object", "additionalProperties": _ID},
    },
    "required": ["max_dim", "objects", "homs", "comp", "ids"],
    "additionalProperties": False,
}

_TABLE_OF_REFS = {"type": "object", "additionalProperties": {"type": "object", "additionalProperties": _REF}}
_TABLE_OF_IDS = {"type": "object", "additionalProperties": {"type": "object", "additionalProperties": _ID}}

BISSET_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "rows": {"type": "array", "items": SSET_SCHEMA, "minItems": 1},
        "faces": _TABLE_OF_REFS,
        "degeneracies": _TABLE_OF_REFS,
    },
    "required": ["rows", "faces", "degeneracies"],
    "additionalProperties": False,
}

NSSET_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "arity": {"type": "integer", "minimum": 0, "maximum": 3},
        "bounds": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "cells": {"type": "object", "additionalProperties": _ID_LIST},
        "faces": _TABLE_OF_IDS,
        "degeneracies": _TABLE_OF_IDS,
    },
    "required": ["arity", "bounds", "cells", "faces", "degeneracies"],
    "additionalProperties": False,
}

_ROWS = {"type": "array", "items": _ID_LIST}

HAMMOCK_SCHEMA = {
    "type": "object",
    "properties": {
        "source": _ID,
        "target": _ID,
        "directions": {"type": "array", "items": {"enum": ["f", "b"]}},
        "objects": _ROWS,
        "horizontal": _ROWS,
        "vertical": _ROWS,
    },
    "required": ["source", "target", "directions", "objects", "horizontal", "vertical"],
    "additionalProperties": False,
}

LOCPAIR_SCHEMA = {
    "type": "object",
    "properties": {"category": FINCAT_SCHEMA, "weq": _ID_LIST},
    "required": ["category", "weq"],
    "additionalProperties": False,
}

SCHEMAS: Mapping[str, dict] = {
    "sset": SSET_SCHEMA,
    "fincat": FINCAT_SCHEMA,
    "scat": SCAT_SCHEMA,
    "bisset": BISSET_SCHEMA,
    "nsset": NSSET_SCHEMA,
    "hammock": HAMMOCK_SCHEMA,
    "locpair": LOCPAIR_SCHEMA,
}


def _validate(obj: Any, schema: dict, prefix: List[Any]) -> None:
    error = best_match(Draft7Validator(schema).iter_errors(obj))
    if error is not None:
        path = prefix + list(error.absolute_path)
        raise DocumentError(f"schema violation at {'/'.join(str(p) for p in path) or '<root>'}: {error.message}", path=path)


# ---------- Envelope ----------


def parse_document(text: str, expect: Optional[str] = None) -> Document:
    """Parse and validate a document; the payload is checked against its kind's schema."""

    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"syntax error: {exc.msg}", position=(exc.lineno, exc.colno)) from None
    _validate(obj, ENVELOPE_SCHEMA, [])
    kind = obj["kind"]
    if expect is not None and kind != expect:
        raise DocumentError(f"expected a {expect} document, got {kind}", path=["kind"])
    _validate(obj["payload"], SCHEMAS[kind], ["payload"])
    return Document(kind, obj["format_version"], obj["payload"])


def emit_document(kind: str, payload: Mapping[str, Any]) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""

    body = {"kind": kind, "format_version": FORMAT_VERSION, "payload": payload}
    return json.dumps(body, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def read_document(path: str, expect: Optional[str] = None) -> Document:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    logger.debug(f"[documents] read {path} ({len(text)} bytes)")
    return parse_document(text, expect)


def load(path: str, expect: Optional[str] = None) -> Any:
    """Read a document and decode it into its domain object."""

    return decode(read_document(path, expect))


def decode(doc: Document) -> Any:
    return DECODERS[doc.kind](doc.payload)


def encode(kind: str, obj: Any) -> str:
    return emit_document(kind, ENCODERS[kind](obj))


def _wrap(path: List[Any], fn: Callable[[], Any]) -> Any:
    """Re-raise construction errors as DocumentErrors rooted at path."""

    try:
        return fn()
    except DocumentError:
        raise
    except InvalidInput as exc:
        raise DocumentError(str(exc), path=path) from None


# ---------- sset ----------


def _ref(obj: Mapping[str, Any]) -> SimplexRef:
    return SimplexRef(obj["base"], tuple(obj["degens"]))


def sset_from_payload(payload: Mapping[str, Any], path: Optional[List[Any]] = None) -> SSet:
    path = path or ["payload"]
    known = {x for level in payload["nd"] for x in level}
    for x, fs in payload["faces"].items():
        if x not in known:
            raise DocumentError(f"faces given for unknown simplex {x!r}", path=path + ["faces", x], ref=x)
        for i, r in enumerate(fs):
            if r["base"] not in known:
                raise DocumentError(f"face d{i} of {x!r} refers to {r['base']!r}", path=path + ["faces", x, i], ref=r["base"])
    nd = {k: ids for k, ids in enumerate(payload["nd"])}
    faces = {x: [_ref(r) for r in fs] for x, fs in payload["faces"].items()}
    return _wrap(path, lambda: SSet.build(payload["max_dim"], nd, faces, name=payload.get("name", "")))


def sset_to_payload(x: SSet) -> Dict[str, Any]:
    out = {
        "max_dim": x.max_dim,
        "nd": [list(x.nondegenerate(k)) for k in range(x.max_dim + 1)],
        "faces": {s: [r.to_json() for r in fs] for s, fs in x.faces.items()},
    }
    if x.name:
        out["name"] = x.name
    return out


# ---------- fincat ----------


def split_pair(key: str, sep: str, path: List[Any]) -> Tuple[str, ...]:
    parts = tuple(key.split(sep))
    if any(not p for p in parts):
        raise DocumentError(f"malformed key {key!r}", path=path)
    return parts


def fincat_from_payload(payload: Mapping[str, Any], path: Optional[List[Any]] = None) -> FinCat:
    path = path or ["payload"]
    objects = set(payload["objects"])
    arrows = {}
    for k, a in enumerate(payload["arrows"]):
        for end in ("dom", "cod"):
            if a[end] not in objects:
                raise DocumentError(f"arrow {a['id']!r} has unknown {end} {a[end]!r}", path=path + ["arrows", k, end], ref=a[end])
        arrows[a["id"]] = (a["dom"], a["cod"])
    comp = {}
    for key, h in payload["comp"].items():
        parts = split_pair(key, "∘", path + ["comp", key])
        if len(parts) != 2:
            raise DocumentError(f"composite key {key!r} must read g∘f", path=path + ["comp", key])
        for f in parts + (h,):
            if f not in arrows:
                raise DocumentError(f"composite {key!r} refers to unknown arrow {f!r}", path=path + ["comp", key], ref=f)
        comp[parts] = h
    for x, i in payload["identities"].items():
        if i not in arrows:
            raise DocumentError(f"identity of {x!r} refers to unknown arrow {i!r}", path=path + ["identities", x], ref=i)
    return _wrap(
        path + ["comp"],
        lambda: make_category(payload["objects"], arrows, payload["identities"], comp, name=payload.get("name", "")),
    )


def fincat_to_payload(c: FinCat) -> Dict[str, Any]:
    out = {
        "objects": list(c.objects),
        "arrows": [{"id": f, "dom": d, "cod": e} for f, (d, e) in sorted(c.arrows.items())],
        "identities": dict(c.identities),
        "comp": {f"{g}∘{f}": h for (g, f), h in c.comp.items()},
    }
    if c.name:
        out["name"] = c.name
    return out


# ---------- scat ----------


def scat_from_payload(payload: Mapping[str, Any], path: Optional[List[Any]] = None) -> SCat:
    path = path or ["payload"]
    objects = set(payload["objects"])
    homs: Dict[Tuple[str, str], SSet] = {}
    for key, h in payload["homs"].items():
        pair = split_pair(key, "→", path + ["homs", key])
        if len(pair) != 2 or not set(pair) <= objects:
            raise DocumentError(f"hom key {key!r} must join two objects", path=path + ["homs", key], ref=key)
        homs[pair] = sset_from_payload(h, path + ["homs", key])
    comp = {}
    for key, table in payload["comp"].items():
        triple = split_pair(key, "→", path + ["comp", key])
        if len(triple) != 3 or any(p not in homs for p in (triple[:2], triple[1:], (triple[0], triple[2]))):
            raise DocumentError(f"composition key {key!r} needs three objects with homs", path=path + ["comp", key], ref=key)
        x, y, z = triple
        src = product(homs[(x, y)], homs[(y, z)])
        tgt = homs[(x, z)]
        for s, r in table.items():
            if not src.contains(s):
                raise DocumentError(f"{s!r} is not a simplex of hom({x},{y})×hom({y},{z})", path=path + ["comp", key, s], ref=s)
            if not tgt.contains(r["base"]):
                raise DocumentError(f"{r['base']!r} is not a simplex of hom({x},{z})", path=path + ["comp", key, s], ref=r["base"])
        comp[triple] = SMap(src, tgt, {s: _ref(r) for s, r in table.items()})
    return _wrap(
        path,
        lambda: SCat(tuple(sorted(objects)), homs, comp, dict(payload["ids"]), payload["max_dim"], payload.get("name", "")).check(),
    )


def scat_to_payload(b: SCat) -> Dict[str, Any]:
    out = {
        "max_dim": b.max_dim,
        "objects": list(b.objects),
        "homs": {f"{x}→{y}": sset_to_payload(h) for (x, y), h in b.homs.items()},
        "comp": {f"{x}→{y}→{z}": {s: r.to_json() for s, r in m.image.items()} for (x, y, z), m in b.comp.items()},
        "ids": dict(b.ids),
    }
    if b.name:
        out["name"] = b.name
    return out


# ---------- hammock / locpair ----------


def hammock_from_payload(payload: Mapping[str, Any]) -> Hammock:
    return Hammock(
        payload["source"],
        payload["target"],
        tuple(payload["directions"]),
        tuple(tuple(r) for r in payload["objects"]),
        tuple(tuple(r) for r in payload["horizontal"]),
        tuple(tuple(r) for r in payload["vertical"]),
    )


def load_hammock(path: str, p: LocPair) -> Hammock:
    h = load(path, "hammock")
    return _wrap(["payload"], lambda: check_hammock(h, p))


def locpair_from_payload(payload: Mapping[str, Any]) -> LocPair:
    c = fincat_from_payload(payload["category"], ["payload", "category"])
    for k, f in enumerate(payload["weq"]):
        if f not in c.arrows:
            raise DocumentError(f"weak equivalence {f!r} is not an arrow", path=["payload", "weq", k], ref=f)
    return _wrap(["payload", "weq"], lambda: make_locpair(c, payload["weq"]))


def locpair_to_payload(p: LocPair) -> Dict[str, Any]:
    return {"category": fincat_to_payload(p.c), "weq": sorted(p.w)}


# ---------- bisset / nsset ----------


def _pair_key(key: str, path: List[Any]) -> Tuple[int, int]:
    try:
        p, i = (int(v) for v in key.split(","))
    except ValueError:
        raise DocumentError(f"row map key {key!r} must read p,i", path=path) from None
    return p, i


def bisset_from_payload(payload: Mapping[str, Any]) -> BiSSet:
    rows = tuple(sset_from_payload(r, ["payload", "rows", p]) for p, r in enumerate(payload["rows"]))

    def maps(field: str, shift: int) -> Dict[Tuple[int, int], SMap]:
        out = {}
        for key, table in payload[field].items():
            p, i = _pair_key(key, ["payload", field, key])
            if not 0 <= p < len(rows) or not 0 <= p + shift < len(rows):
                raise DocumentError(f"row map {key!r} leaves the stored rows", path=["payload", field, key])
            out[(p, i)] = SMap(rows[p], rows[p + shift], {x: _ref(r) for x, r in table.items()})
        return out

    faces, degens = maps("faces", -1), maps("degeneracies", 1)
    return _wrap(["payload"], lambda: BiSSet(rows, faces, degens, payload.get("name", "")).check())


def bisset_to_payload(a: BiSSet) -> Dict[str, Any]:
    out = {
        "rows": [sset_to_payload(r) for r in a.rows],
        "faces": {f"{p},{i}": {x: r.to_json() for x, r in m.image.items()} for (p, i), m in a.faces.items()},
        "degeneracies": {f"{p},{i}": {x: r.to_json() for x, r in m.image.items()} for (p, i), m in a.degeneracies.items()},
    }
    if a.name:
        out["name"] = a.name
    return out


def index_key(index: Tuple[int, ...]) -> str:
    return ",".join(str(v) for v in index)


def parse_index(key: str, path: List[Any]) -> Tuple[int, ...]:
    if key == "":
        return ()
    try:
        return tuple(int(v) for v in key.split(","))
    except ValueError:
        raise DocumentError(f"index {key!r} must be comma separated integers", path=path) from None


def _map_key(index: Tuple[int, ...], d: int, i: int) -> str:
    return f"{index_key(index)}|{d}|{i}"


def nsset_from_payload(payload: Mapping[str, Any]) -> NSSet:
    arity, bounds = payload["arity"], tuple(payload["bounds"])
    if len(bounds) != arity:
        raise DocumentError(f"arity {arity} needs {arity} bounds", path=["payload", "bounds"])
    cells = {parse_index(k, ["payload", "cells", k]): tuple(v) for k, v in payload["cells"].items()}

    def maps(field: str) -> Dict[Tuple[Tuple[int, ...], int, int], Dict[str, str]]:
        out = {}
        for key, table in payload[field].items():
            parts = key.split("|")
            if len(parts) != 3:
                raise DocumentError(f"structure map key {key!r} must read index|direction|i", path=["payload", field, key])
            try:
                d, i = int(parts[1]), int(parts[2])
            except ValueError:
                raise DocumentError(f"structure map key {key!r} must read index|direction|i", path=["payload", field, key]) from None
            out[(parse_index(parts[0], ["payload", field, key]), d, i)] = dict(table)
        return out

    return _wrap(
        ["payload"],
        lambda: NSSet(arity, bounds, cells, maps("faces"), maps("degeneracies"), name=payload.get("name", "")).check(),
    )


def nsset_to_payload(a: NSSet) -> Dict[str, Any]:
    out = {
        "arity": a.arity,
        "bounds": list(a.bounds),
        "cells": {index_key(k): list(v) for k, v in a.cells.items()},
        "faces": {_map_key(*k): dict(v) for k, v in a.faces.items()},
        "degeneracies": {_map_key(*k): dict(v) for k, v in a.degeneracies.items()},
    }
    if a.name:
        out["name"] = a.name
    return out


DECODERS: Mapping[str, Callable[[Mapping[str, Any]], Any]] = {
    "sset": sset_from_payload,
    "fincat": fincat_from_payload,
    "scat": scat_from_payload,
    "bisset": bisset_from_payload,
    "nsset": nsset_from_payload,
    "hammock": hammock_from_payload,
    "locpair": locpair_from_payload,
}

ENCODERS: Mapping[str, Callable[[Any], Dict[str, Any]]] = {
    "sset": sset_to_payload,
    "fincat": fincat_to_payload,
    "scat": scat_to_payload,
    "bisset": bisset_to_payload,
    "nsset": nsset_to_payload,
    "hammock": lambda h: h.to_json(),
    "locpair": locpair_to_payload,
}
