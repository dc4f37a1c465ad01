"""Command reports and witness replay."""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional

from services.cat_core import segal_map
from services.enriched import SCat
from services.hammock import LeftFractionVerdict, check_left_fractions
from services.hc_nerve import hc_nerve
from services.quasi import find_filler, horn_instance
from services.segal import BiSSet, segal_preimages
from services.simplicial_core import SSet, SimplexRef
from utils.errors import InternalCheckFailed, InvalidInput

logger = logging.getLogger("reports")


@dataclass
class Report:
    command: str
    verdict: Optional[bool] = None
    bounds: Dict[str, int] = field(default_factory=dict)
    witness: Optional[Dict[str, Any]] = None
    result: Optional[Any] = None
    timing: Optional[float] = None
    preview: Optional[str] = None

    def __post_init__(self):
        if self.verdict is False and self.witness is None:
            raise InternalCheckFailed(f"failing verdict of {self.command!r} has no witness")

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"command": self.command}
        if self.verdict is not None:
            out["verdict"] = self.verdict
        if self.bounds:
            out["bounds"] = dict(self.bounds)
        if self.witness is not None:
            out["witness"] = self.witness
        if self.result is not None:
            out["result"] = self.result
        if self.timing is not None:
            out["timing_s"] = round(self.timing, 6)
        return out

    def render(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _ref(obj: Mapping[str, Any]) -> SimplexRef:
    return SimplexRef(obj["base"], tuple(obj["degens"]))


def _replay_horn(x: SSet, witness: Mapping[str, Any]) -> bool:
    h = horn_instance(x, witness["n"], witness["i"], {k: _ref(r) for k, r in witness["image"].items()})
    return find_filler(h) is None


def _replay_segalmap(x: SSet, witness: Mapping[str, Any]) -> bool:
    spine = tuple(_ref(r) for r in witness["spine"])
    found = segal_map(x, witness["p"]).preimages().get(spine, [])
    return (not found) if witness["kind"] == "not_surjective" else len(found) > 1


def _replay_segal_check(a: BiSSet, witness: Mapping[str, Any]) -> bool:
    spine = tuple(_ref(r) for r in witness["spine"])
    found = segal_preimages(a, len(spine), witness["q"]).get(spine, [])
    return (not found) if witness["kind"] == "not_surjective" else len(found) > 1


def _replay_leftfrac(verdict: LeftFractionVerdict, witness: Mapping[str, Any]) -> bool:
    return not verdict.holds and verdict.condition == witness.get("condition") and verdict.witness == {
        k: v for k, v in witness.items() if k != "condition"
    }


def replay_witness(report: Mapping[str, Any], document: Any) -> bool:
    """Re-run the failing check named by a serialized report on its decoded input.

    Returns True when the witness still produces the same failing verdict.
    """

    command, witness = report.get("command"), report.get("witness")
    if report.get("verdict") is not False or witness is None:
        raise InvalidInput("only failing reports with a witness can be replayed")
    if command == "hcnerve" and isinstance(document, SCat):
        document = hc_nerve(document, report["bounds"]["max_dim"])
    if command in ("kan", "quasi", "hcnerve"):
        same = _replay_horn(document, witness)
    elif command == "segalmap":
        same = _replay_segalmap(document, witness)
    elif command == "segal check":
        same = _replay_segal_check(document, witness)
    elif command == "leftfrac":
        same = _replay_leftfrac(check_left_fractions(document), witness)
    else:
        raise InvalidInput(f"no replay is defined for {command!r}")
    logger.info(f"[replay] {command}: {'reproduced' if same else 'not reproduced'}")
    return same
