import json
from pathlib import Path

import pytest

from projcalc.cli import run
from projcalc.witness import load_witness

FIX = Path(__file__).parent / "fixtures"


def call(capsys, *argv):
    code = run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def symbols(tmp_path):
    w = load_witness()
    paths = {}
    for name, t in (("s4", w.symbol4), ("s5", w.symbol5)):
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(t.to_json()))
        paths[name] = p
    low = dict(w.symbol4.to_json(), up=3, components={"1,1,3;": "1"})
    paths["s3"] = tmp_path / "s3.json"
    paths["s3"].write_text(json.dumps(low))
    return paths


def test_weyl_on_flat_connection(capsys):
    code, out, _ = call(capsys, "weyl", FIX / "flat3.json")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"P", "kappa0", "kappa1", "kappa_minus1"}
    assert all(v["components"] == {} for v in data.values())


def test_check_recursion_passes(capsys):
    code, out, _ = call(capsys, "check-recursion", "--m", 3, "--k", 3, "--l", 5, "--j", 2)
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_map4_precondition(capsys, symbols):
    code, _, err = call(capsys, "map4", FIX / "flat3.json", symbols["s3"])
    assert code == 2 and "k >= 4" in err


def test_map4_on_witness(capsys, symbols, tmp_path):
    conn = tmp_path / "w.json"
    conn.write_text(json.dumps(load_witness().connection.to_json()))
    code, out, _ = call(capsys, "map4", conn, symbols["s4"])
    assert code == 0 and json.loads(out)["result"]["components"] == {";": "12"}


def test_map5_and_critical_delta(capsys, symbols, tmp_path):
    conn = tmp_path / "w.json"
    conn.write_text(json.dumps(load_witness().connection.to_json()))
    code, out, _ = call(capsys, "map5", conn, symbols["s5"], "--delta", "1/3")
    assert code == 0 and json.loads(out)["coefficient"] == "3/4"
    code, _, err = call(capsys, "map5", conn, symbols["s5"], "--delta", "1/4")
    assert code == 2 and "differs" in err
    crit = json.loads(symbols["s5"].read_text())
    crit["weight"] = "3"
    bad = tmp_path / "crit.json"
    bad.write_text(json.dumps(crit))
    code, _, err = call(capsys, "map5", conn, bad)
    assert code == 2 and "gamma_9" in err


def test_check_invariance(capsys, symbols):
    code, out, _ = call(capsys, "check-invariance", FIX / "curved3.json", "--symbol", symbols["s4"],
                        "--alpha-file", FIX / "alpha3.json", "--affine-file", FIX / "affine3.json")
    reports = json.loads(out)["reports"]
    assert code == 0 and len(reports) == 4
    assert all(r["status"] == "pass" for r in reports)


def test_check_invariance_order_five(capsys, symbols):
    code, out, _ = call(capsys, "check-invariance", FIX / "curved3.json", "--symbol", symbols["s5"],
                        "--order", 5, "--alpha-file", FIX / "alpha3.json")
    assert code == 0, out


def test_check_lemma_and_theorem(capsys):
    code, out, _ = call(capsys, "check-lemma", "--k", 1, "--j", 2, "--m", 3)
    assert code == 0 and json.loads(out)["parameters"]["coefficient"] == -8
    code, out, _ = call(capsys, "check-theorem", "--l", 5, "--j", 2, "--m", 3)
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_build_w_with_sigma(capsys, tmp_path):
    conn = tmp_path / "w.json"
    conn.write_text(json.dumps(load_witness().connection.to_json()))
    code, out, _ = call(capsys, "build-w", conn, "--sigma", "2,1")
    assert code == 0 and json.loads(out)["W"]["components"]
    code, _, err = call(capsys, "build-w", conn, "--sigma", "1,2")
    assert code == 2 and "fixes" in err


@pytest.mark.parametrize("argv", [
    ["weyl", "missing.json"],
    ["check-recursion", "--k", "3", "--l", "3", "--j", "2", "--m", "3"],
    ["check-recursion", "--k", "3", "--l", "5", "--j", "2", "--m", "3", "--delta", "x"],
    ["check-lemma", "--k", "1", "--j", "1", "--m", "3"],
    ["no-such-command"],
    ["check-invariance", "tests/fixtures/flat3.json"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert call(capsys, *argv)[0] == 2


def test_bad_connection_file(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 2, "gamma": {"1,1,2": "x1 +"}}')
    code, _, err = call(capsys, "weyl", p)
    assert code == 2 and "position" in err


def test_output_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert call(capsys, "weyl", FIX / "curved3.json", "--out", p)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_demo(capsys):
    code, out, _ = call(capsys, "demo-nonuniqueness")
    data = json.loads(out)
    assert code == 0 and data["map4_nonzero"]
    assert all(r["status"] == "pass" for r in data["reports"])


def test_demo_on_flat_connection_is_inconclusive(capsys):
    code, out, _ = call(capsys, "demo-nonuniqueness", FIX / "flat3.json")
    assert code == 1 and not json.loads(out)["map4_nonzero"]
