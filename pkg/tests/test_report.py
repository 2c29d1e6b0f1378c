import json
from fractions import Fraction

import pytest

from core.classes import check_AP, check_age_class, flim_prefix
from core.errors import MalformedInputError
from core.expansions import ExpansionSpec, check_expP
from core.ramsey import arrow_check, degree_report
from utils.cache import ResultCache, cache_key
from utils.io_format import load_json, parse_class, parse_expansion, parse_inputs
from utils.library import complete_graph, linear_order, resolve_class
from utils.report import STRUCTURED, TEXT, emit_report, template_name
from utils.results import GenerateResult
from utils.serialization import SCHEMA, emit, parse


@pytest.fixture(scope="module")
def lo5_result():
    return arrow_check(linear_order(5), linear_order(3), linear_order(2), 2, 1)


def test_round_trip_arrow_result(lo5_result):
    assert parse(emit(lo5_result)) == lo5_result


def test_round_trip_reports(graphs, c3c5free, linear_orders, sets_p):
    reports = [
        check_AP(c3c5free, 4, 7),
        degree_report(graphs, complete_graph(2), witness_bound=3),
        flim_prefix(graphs, 5),
        check_expP(sets_p, 3, a_size=1),
        {"ratio": Fraction(3, 4), "items": frozenset({(1, 2), (2, 1)}), "raw": b"\x00\xff"},
    ]
    for report in reports:
        assert parse(emit(report)) == report


def test_emit_is_byte_stable(lo5_result):
    assert emit(lo5_result) == emit(parse(emit(lo5_result)))
    assert json.loads(emit(lo5_result))["schema"] == SCHEMA


def test_parse_rejects_wrong_schema():
    with pytest.raises(MalformedInputError):
        parse(b'{"schema": "other/9", "result": null}')
    with pytest.raises(MalformedInputError):
        parse(b"not json")


def test_parse_rejects_unknown_type():
    doc = {"schema": SCHEMA, "result": {"__type__": "Nope", "fields": {}}}
    with pytest.raises(MalformedInputError):
        parse(json.dumps(doc).encode())


def test_template_selection(lo5_result):
    assert template_name(lo5_result) == "arrow_result.j2"
    assert template_name(GenerateResult("graphs", 0, ())) == "generate_result.j2"


def test_text_and_structured_rendering(lo5_result):
    text = emit_report(lo5_result, TEXT).decode("utf-8")
    assert "结论: fails" in text
    assert parse(emit_report(lo5_result, STRUCTURED)) == lo5_result
    with pytest.raises(ValueError):
        emit_report(lo5_result, "xml")


def test_generic_template_renders_any_result(linear_orders):
    text = emit_report(check_age_class(linear_orders, 3, 2)).decode("utf-8")
    assert text.startswith("AgeReport")


def test_cache_hit_and_miss(tmp_path, lo5_result):
    cache = ResultCache(tmp_path)
    key = cache.key("arrow", {"C": lo5_result.query.C})
    assert cache.get(key) is None
    assert cache.put(key, "arrow", lo5_result)
    assert cache.get(key, lambda r: r.verify()) == lo5_result
    assert (cache.hits, cache.misses) == (1, 1)


def test_cache_evicts_tampered_entry(tmp_path, lo5_result):
    cache = ResultCache(tmp_path)
    key = cache.key("arrow", {"n": 5})
    cache.put(key, "arrow", lo5_result)
    path = tmp_path / f"{key}.json"
    entry = json.loads(path.read_text())
    entry["payload"] = entry["payload"].replace('"fails"', '"holds"')
    path.write_text(json.dumps(entry))
    assert cache.get(key) is None
    assert not path.exists()


def test_cache_evicts_entry_failing_reverification(tmp_path, lo5_result):
    cache = ResultCache(tmp_path)
    key = cache.key("arrow", {"n": 5})
    cache.put(key, "arrow", lo5_result)
    assert cache.get(key, lambda _: False) is None
    assert not (tmp_path / f"{key}.json").exists()


def test_cache_version_bump_is_a_miss(tmp_path, lo5_result):
    old = ResultCache(tmp_path, version="0.0.1")
    key = old.key("arrow", {"n": 5})
    old.put(key, "arrow", lo5_result)
    new = ResultCache(tmp_path, version="0.0.2")
    assert new.get(key) is None
    assert cache_key("arrow", {"n": 5}, "0.0.1") != cache_key("arrow", {"n": 5}, "0.0.2")


def test_cache_disabled_on_unusable_directory(tmp_path, lo5_result):
    blocker = tmp_path / "file"
    blocker.write_text("")
    cache = ResultCache(blocker / "sub")
    assert not cache.enabled
    assert not cache.put("k", "arrow", lo5_result)
    assert cache.get("k") is None


def test_cache_key_ignores_dict_order():
    assert cache_key("op", {"a": 1, "b": 2}) == cache_key("op", {"b": 2, "a": 1})


def test_load_json_reports_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"size": 3,\n  "relations": }')
    with pytest.raises(MalformedInputError) as info:
        load_json(bad)
    assert "第 2 行" in str(info.value)


def test_parse_class_field_paths():
    doc = {"name": "x", "signature": [{"name": "E", "arity": 2}],
           "forbidden": [{"signature": [{"name": "E", "arity": 2}], "size": 2, "relations": {"E": [[1, 3]]}}]}
    with pytest.raises(MalformedInputError) as info:
        parse_class(doc, resolve_class)
    assert info.value.field_path.startswith("forbidden[0].relations.E[")


def test_parse_class_rejects_unknown_field():
    with pytest.raises(MalformedInputError):
        parse_class({"name": "x", "signature": [], "colour": 1}, resolve_class)


def test_superposed_class(graphs, linear_orders):
    spec = parse_class({"name": "og", "superpose": ["graphs", "linear-orders"]}, resolve_class)
    assert spec.sig.names == ("E", "lt")


def test_parse_expansion_alignment():
    doc = {"name": "e", "base": "graphs", "extended": "ordered-graphs", "alignment": ["lt"]}
    with pytest.raises(MalformedInputError) as info:
        parse_expansion(doc, resolve_class)
    assert info.value.field_path == "alignment"
    doc["alignment"] = ["E"]
    assert isinstance(parse_expansion(doc, resolve_class), ExpansionSpec)


def test_parse_inputs_dispatches_on_shape(tmp_path):
    structure = tmp_path / "k2.json"
    structure.write_text(json.dumps(complete_graph(2).to_document()))
    klass = tmp_path / "tf.json"
    klass.write_text(json.dumps({"name": "tf", "signature": [{"name": "E", "arity": 2}],
                                 "forbidden": [complete_graph(3).to_document()]}))
    expansion = tmp_path / "exp.json"
    expansion.write_text(json.dumps({"name": "e", "base": "sets", "extended": "sets-with-p"}))
    parsed = parse_inputs([structure, klass, expansion], resolve_class)
    assert parsed[0] == complete_graph(2)
    assert parsed[1].name == "tf"
    assert isinstance(parsed[2], ExpansionSpec)
