import importlib.util
import json
from pathlib import Path

import pytest

from projcalc.cartan import normal_weyl
from projcalc.invariants import build_w
from projcalc.report import Report
from projcalc.witness import load_witness, parse_affine

ROOT = Path(__file__).resolve().parents[1]


def _search_module():
    spec = importlib.util.spec_from_file_location("find_witness", ROOT / "scripts" / "find_witness.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def test_search_reproduces_stored_witness(tmp_path, monkeypatch):
    out = tmp_path / "found.json"
    monkeypatch.setattr("sys.argv", ["find_witness", "--out", str(out)])
    _search_module().main()
    assert json.loads(out.read_text()) == load_witness().connection.to_json()


def test_witness_has_nonvanishing_w():
    w = load_witness()
    assert not build_w(normal_weyl(w.connection), (2, 1)).is_zero()
    assert w.symbol5.weight == w.delta


def test_parse_affine_rejects_garbage():
    with pytest.raises(ValueError):
        parse_affine({"A": [["1/0"]], "b": ["0"]})
    with pytest.raises(ValueError):
        parse_affine({"b": []})


def test_report_serialization_is_sorted():
    r = Report("x = y", {"b": 1, "a": 2}, "fail", {"index": [1]})
    assert not r.passed
    text = r.dumps()
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text)["witness"] == {"index": [1]}
