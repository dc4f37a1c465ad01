"""Helpers shared by the subcommand modules."""

import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

import pandas as pd

from config import Config
from utils.documents import encode

logger = logging.getLogger("commands")


def max_dim(args: Any, ceiling: Optional[int] = None) -> int:
    """--max-dim, else the configured default capped by the input's truncation."""

    if getattr(args, "max_dim", None) is not None:
        return args.max_dim
    return Config.MAX_DIM if ceiling is None else min(Config.MAX_DIM, ceiling)


def write_out(args: Any, kind: str, obj: Any) -> Optional[str]:
    """Write the produced document when --out was given; returns the path."""

    path = getattr(args, "out", None)
    if not path:
        return None
    Path(path).write_text(encode(kind, obj), encoding="utf-8")
    logger.info(f"[out] wrote {kind} document to {path}")
    return path


def table(rows: Iterable[Mapping[str, Any]]) -> str:
    rows = list(rows)
    if not rows:
        return "(empty)"
    return pd.DataFrame(rows).to_string(index=False)


def simplex_rows(x: Any, top: int) -> list:
    """One row per nondegenerate simplex: id, dimension and face keys."""

    return [
        {"dim": k, "id": s, "faces": " ".join(r.key for r in x.faces.get(s, ()))}
        for k in range(min(top, x.max_dim) + 1)
        for s in x.nondegenerate(k)
    ]
