"""Command-line behavior: output text, JSON documents, exit codes."""

import json

import pytest

from finfib.cli import main
from finfib.documents import functor_to_doc, map_from_doc, poset_from_doc
from finfib.gallery import ENTRIES, gallery_map
from finfib.grothendieck import beta_functor
from finfib.posets import find_isomorphism_over_base


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_hurewicz_fibration(capsys):
    code, out, _ = run(capsys, "check", "hurewicz", "gallery:p1")
    assert code == 0
    assert out.strip() == "fibration (certificate: minimum-base bifibration)"


def test_check_hurewicz_refuted(capsys):
    code, out, _ = run(capsys, "check", "hurewicz", "gallery:p2")
    assert code == 1
    assert out.strip() == "not a fibration (witness: cocartesian lift missing at ((a,2), b))"


def test_check_hurewicz_unknown(capsys):
    code, out, _ = run(capsys, "check", "hurewicz", "gallery:p3")
    assert code == 2
    assert out.strip() == "unknown"


def test_check_hurewicz_verbose_and_json(capsys):
    code, out, _ = run(capsys, "check", "hurewicz", "gallery:p3", "--verbose")
    assert code == 2
    assert "necessary conditions all pass" in out
    code, out, _ = run(capsys, "check", "hurewicz", "gallery:p3", "--json")
    doc = json.loads(out)
    assert doc["status"] == "unknown"
    assert doc["components"][0]["status"] == "unknown"


def test_info_poset_summary(capsys):
    code, out, _ = run(capsys, "info", "gallery:B3")
    assert code == 0
    assert out.strip() == "5 elements, height 2, connected, not minimal"
    code, out, _ = run(capsys, "info", "gallery:B3", "--verbose")
    assert "covers: a < c, a < d, b < c, b < d, c < e, d < e" in out
    assert "up beat points: {'c': 'e', 'd': 'e'}" in out


def test_info_singleton(capsys, tmp_path):
    f = tmp_path / "one.json"
    f.write_text(json.dumps({"elements": ["x"], "covers": []}))
    code, out, _ = run(capsys, "info", str(f))
    assert code == 0
    assert out.startswith("1 element, height 0, connected, minimal")


def test_info_map(capsys):
    code, out, _ = run(capsys, "info", "gallery:pi_sierpinski", "--verbose")
    assert code == 0
    assert "map with 8 -> 2 elements, surjective" in out
    assert "fiber(0):" in out
    code, out, _ = run(capsys, "info", "gallery:p1", "--json")
    doc = json.loads(out)
    assert doc["kind"] == "map"
    assert doc["map_beat_points"]["down"] == {"(a,1)": "(a,0)"}


def test_check_open_closed(capsys):
    code, out, _ = run(capsys, "check", "open", "gallery:p1")
    assert (code, out.strip()) == (0, "open")
    code, out, _ = run(capsys, "check", "open", "gallery:p1op")
    assert code == 1
    assert out.startswith("not open (witness: e=")
    code, out, _ = run(capsys, "check", "closed", "gallery:p1op")
    assert (code, out.strip()) == (0, "closed")


def test_check_groth(capsys):
    code, out, _ = run(capsys, "check", "groth", "gallery:p3")
    assert code == 0
    assert out.splitlines() == ["fibration: yes", "opfibration: yes", "bifibration: yes"]
    code, out, _ = run(capsys, "check", "groth", "gallery:p2")
    assert code == 1
    assert "opfibration: no (cocartesian lift missing at ((a,2), b))" in out
    code, out, _ = run(capsys, "check", "groth", "gallery:p2", "--verbose")
    assert "[no_minimum]" in out


def test_check_bundle(capsys):
    code, out, _ = run(capsys, "check", "bundle", "gallery:pi_sierpinski")
    assert (code, out.strip()) == (0, "fiber bundle")
    code, out, _ = run(capsys, "check", "bundle", "gallery:p3")
    assert code == 1
    assert out.strip() == "not a fiber bundle (fails over c)"
    code, out, _ = run(capsys, "check", "bundle", "gallery:pi_sierpinski", "--budget", "0")
    assert code == 2
    assert out.strip() == "undecided (budget exhausted over 0)"


def test_check_core_and_map_core(capsys):
    code, out, _ = run(capsys, "check", "core", "gallery:B3")
    assert code == 0
    assert "core: " in out and "removed: " in out
    code, out, _ = run(capsys, "check", "map-core", "gallery:p1")
    assert code == 0
    assert "map core total: (a,0), (b,0)" in out
    assert "removed: (a,1) (down)" in out


def test_check_necessary(capsys):
    code, out, _ = run(capsys, "check", "necessary", "gallery:p3")
    assert (code, out.strip()) == (0, "all necessary conditions pass")
    code, out, _ = run(capsys, "check", "necessary", "gallery:p2")
    assert code == 1
    assert "up_reachability: FAIL" in out
    code, out, _ = run(capsys, "check", "necessary", "gallery:p2", "--json")
    doc = json.loads(out)
    assert doc["all_pass"] is False


def test_gallery_list_and_emit(capsys):
    code, out, _ = run(capsys, "gallery", "list")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == len(ENTRIES) >= 7
    assert any(line.startswith("p2 ") for line in lines)
    code, out, _ = run(capsys, "gallery", "emit", "p2")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["document"]["domain"]["elements"]) == 4
    assert len(doc["document"]["codomain"]["elements"]) == 2
    assert doc["expected"]["hurewicz"] == "not_fibration"
    code, _, err = run(capsys, "gallery", "emit", "nope")
    assert code == 3
    assert "error:" in err


def test_file_inputs_text_and_json(capsys, tmp_path):
    text = tmp_path / "p.txt"
    text.write_text(
        "poset E { points: x, y; covers: x < y; }\n"
        "poset B { points: a, b; covers: a < b; }\n"
        "map p : E -> B { x -> a; y -> b; }\n"
    )
    code, out, _ = run(capsys, "check", "hurewicz", str(text))
    assert code == 0
    jf = tmp_path / "m.json"
    jf.write_text(json.dumps({"domain": "gallery:E2", "codomain": "gallery:B2",
                              "values": gallery_map("p2").values}))
    code, out, _ = run(capsys, "check", "hurewicz", str(jf))
    assert code == 1


def test_input_errors_exit_3(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "info", str(bad))[0] == 3
    assert run(capsys, "info", str(tmp_path / "missing.json"))[0] == 3
    assert run(capsys, "check", "hurewicz", "gallery:B1")[0] == 3  # poset, not a map
    assert run(capsys, "check", "hurewicz", "gallery:zzz")[0] == 3
    cyc = tmp_path / "cyc.json"
    cyc.write_text(json.dumps({"elements": ["a", "b"], "covers": [["a", "b"], ["b", "a"]]}))
    assert run(capsys, "info", str(cyc))[0] == 3
    notmono = tmp_path / "nm.json"
    notmono.write_text(json.dumps({
        "domain": {"elements": ["x", "y"], "covers": [["x", "y"]]},
        "codomain": "gallery:B1",
        "values": {"x": "b", "y": "a"},
    }))
    assert run(capsys, "check", "groth", str(notmono))[0] == 3


def test_usage_errors_exit_3(capsys):
    assert run(capsys, "check", "frobnicate", "gallery:p1")[0] == 3
    assert run(capsys, "nonsense")[0] == 3
    assert run(capsys)[0] == 3
    assert run(capsys, "--help")[0] == 0


def test_construct_round_trips_p3(capsys, tmp_path):
    p3 = gallery_map("p3")
    doc = functor_to_doc(beta_functor(p3))
    f = tmp_path / "beta.json"
    f.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "construct", str(f), "--out", str(tmp_path / "built"))
    assert code == 0
    assert "wrote" in out
    rebuilt = map_from_doc(json.loads((tmp_path / "built" / "projection.json").read_text()))
    assert rebuilt.cod == p3.cod
    assert find_isomorphism_over_base(rebuilt, p3) is not None


def test_construct_inline_output(capsys, tmp_path):
    # constant functor over the two point chain: the construction is a product
    doc = {
        "base": {"elements": ["0", "1"], "covers": [["0", "1"]]},
        "variance": "covariant",
        "fibers": {
            "0": {"elements": ["u", "v"], "covers": [["u", "v"]]},
            "1": {"elements": ["u", "v"], "covers": [["u", "v"]]},
        },
        "transitions": {"0<=1": {"u": "u", "v": "v"}},
    }
    f = tmp_path / "const.json"
    f.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "construct", str(f))
    assert code == 0
    built = json.loads(out)
    total = poset_from_doc(built["total"])
    assert total.n == 4
    proj = map_from_doc(built["projection"])
    assert proj.is_surjective()
    assert {proj(e) for e in total.elements} == {"0", "1"}


def test_construct_rejects_non_functor_input(capsys, tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"elements": ["a"], "covers": []}))
    code, _, err = run(capsys, "construct", str(f))
    assert code == 3
    assert "not a functor document" in err
    g = tmp_path / "func.json"
    g.write_text(json.dumps({
        "base": {"elements": ["0", "1"], "covers": [["0", "1"]]},
        "variance": "covariant",
        "fibers": {
            "0": {"elements": ["u", "v"], "covers": [["u", "v"]]},
            "1": {"elements": ["u"], "covers": []},
        },
        "transitions": {"0<=1": {"u": "u", "v": "v"}},
    }))
    assert run(capsys, "construct", str(g))[0] == 3
    code, _, err = run(capsys, "check", "groth", str(g))
    assert code == 3
    assert "construct" in err


def test_gallery_target_reaches_every_check(capsys):
    for which in ("open", "closed", "groth", "bundle", "hurewicz", "core", "map-core", "necessary"):
        code, out, _ = run(capsys, "check", which, "gallery:pi_sierpinski")
        assert code == 0
        assert out.strip()


def test_json_mode_everywhere(capsys):
    for argv in (
        ["info", "gallery:B5", "--json"],
        ["check", "groth", "gallery:p1", "--json"],
        ["check", "bundle", "gallery:p5_minimal_bifib", "--json"],
        ["check", "core", "gallery:E3", "--json"],
        ["check", "map-core", "gallery:p3", "--json"],
        ["gallery", "list", "--json"],
    ):
        _, out, _ = run(capsys, *argv)
        json.loads(out)
