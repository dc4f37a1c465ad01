import json

import pytest

from conftest import FIXTURES
from services.cat_core import nerve, ordinal
from services.enriched import s_ordinal
from services.segal import NSSet
from utils.documents import decode, encode, emit_document, parse_document
from utils.errors import DocumentError


@pytest.mark.parametrize("path", sorted(FIXTURES.iterdir()), ids=lambda p: p.name)
def test_fixtures_are_canonical(path):
    text = path.read_text(encoding="utf-8")
    doc = parse_document(text)
    assert encode(doc.kind, decode(doc)) == text


def test_emitted_documents_are_sorted_and_terminated():
    text = emit_document("fincat", {"objects": ["0"], "arrows": [], "identities": {}, "comp": {}})
    assert text.endswith("}\n")
    assert list(json.loads(text)) == ["format_version", "kind", "payload"]


@pytest.mark.parametrize(
    "kind,obj",
    [("scat", s_ordinal(2, 1)), ("nsset", NSSet.from_sset(nerve(ordinal(1), 2)))],
    ids=["scat", "nsset"],
)
def test_codecs_are_stable(kind, obj):
    text = encode(kind, obj)
    assert encode(kind, decode(parse_document(text, expect=kind))) == text


def test_syntax_errors_carry_a_position():
    with pytest.raises(DocumentError) as info:
        parse_document('{"kind": "sset",\n  "payload": ')
    assert info.value.position[0] == 2
    assert "line" in info.value.diagnostic()


def test_wrong_kind_is_reported():
    text = (FIXTURES / "ordinal1.fincat").read_text(encoding="utf-8")
    with pytest.raises(DocumentError) as info:
        parse_document(text, expect="sset")
    assert info.value.path == ["kind"]


def test_schema_violation_names_the_path():
    doc = {"kind": "sset", "format_version": 1, "payload": {"max_dim": -1, "nd": [], "faces": {}}}
    with pytest.raises(DocumentError) as info:
        parse_document(json.dumps(doc))
    assert info.value.path == ["payload", "max_dim"]
    assert info.value.diagnostic()["path"] == ["payload", "max_dim"]


def test_unsupported_version():
    doc = {"kind": "sset", "format_version": 2, "payload": {"max_dim": 0, "nd": [["a"]], "faces": {}}}
    with pytest.raises(DocumentError):
        parse_document(json.dumps(doc))


def test_dangling_face_reference():
    payload = {"max_dim": 1, "nd": [["a"], ["e"]], "faces": {"e": [{"base": "a", "degens": []}, {"base": "b", "degens": []}]}}
    with pytest.raises(DocumentError) as info:
        decode(parse_document(emit_document("sset", payload)))
    assert info.value.ref == "b"
    assert info.value.path == ["payload", "faces", "e", 1]


def test_missing_composite_is_located():
    obj = json.loads((FIXTURES / "ordinal1.fincat").read_text(encoding="utf-8"))
    del obj["payload"]["comp"]["11∘01"]
    with pytest.raises(DocumentError, match="11∘01") as info:
        decode(parse_document(json.dumps(obj, ensure_ascii=False)))
    assert info.value.path == ["payload", "comp"]
