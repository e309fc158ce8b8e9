import json
import subprocess
import sys
from pathlib import Path

import pytest

from cmlcoord.cli import matrix_idempotent_count, run
from cmlcoord.lattice import dumps_canonical, lattice_from_json, lattice_to_json

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def cli(*argv):
    return run([str(a) for a in argv])


def cli_json(*argv):
    code, text = cli(*argv, "--json")
    return code, json.loads(text)


def test_validate_m3():
    code, rep = cli_json("validate", SAMPLES / "m3.json")
    assert code == 0
    names = {c["name"]: c["passed"] for c in rep["checks"]}
    assert names["modular"] and names["complemented"]


def test_validate_n5_reports_witness():
    code, rep = cli_json("validate", SAMPLES / "n5.json")
    assert code == 1
    bad = [c for c in rep["checks"] if not c["passed"]]
    assert [c["name"] for c in bad] == ["modular"] and bad[0]["witness"] == ["x", "y", "z"]


def test_validate_chain3_and_z4():
    code, rep = cli_json("validate", SAMPLES / "chain3.json")
    assert code == 1 and [c["witness"] for c in rep["checks"] if not c["passed"]] == ["m"]
    code, rep = cli_json("validate", SAMPLES / "z4.json")
    assert code == 1 and [c["witness"] for c in rep["checks"] if not c["passed"]] == ["2"]


def test_every_failure_carries_a_witness():
    for sample in ("n5.json", "chain3.json", "z4.json"):
        _, rep = cli_json("validate", SAMPLES / sample)
        assert all("witness" in c for c in rep["checks"] if not c["passed"])


@pytest.mark.parametrize("ref,size", [("catalog:M3", 8), ("catalog:B2", 4), ("catalog:one", 1)])
def test_biorder_counts(ref, size):
    code, rep = cli_json("biorder", ref)
    assert code == 0 and rep["data"]["elements"] == size


def test_biorder_semigroup_and_dot(tmp_path):
    dot = tmp_path / "e.dot"
    code, rep = cli_json("biorder", "catalog:M3", "--semigroup", "--dot", dot)
    assert code == 0 and rep["data"]["semigroup_size"] == 11
    assert dot.read_text().startswith("graph E {")


def test_biorder_rejects_n5_as_input_error():
    code, text = cli("biorder", SAMPLES / "n5.json")
    assert code == 2 and "not modular" in text


def test_sandwich_by_label():
    code, rep = cli_json("sandwich", "catalog:M3", "(a1;a2)", "(a1;a3)")
    assert code == 0 and rep["data"]["S"] == ["(a1;a2)"] == rep["data"]["S_via_complements"]
    code, rep = cli_json("sandwich", "catalog:M3", "(a1;a2)", "(a2;a1)")
    assert rep["data"]["S"] == ["(1;0)"] and rep["data"]["distance"] == 3
    assert rep["data"]["chain"] == ["(a1;a2)", "(a1;a3)", "(a2;a3)", "(a2;a1)"]


def test_sandwich_index_fallback_and_unknown():
    code, rep = cli_json("sandwich", "catalog:M3", "2;3", "(a1;a3)")
    assert code == 0 and rep["data"]["e"] == "(a2;a3)"
    code, text = cli("sandwich", "catalog:M3", "(a1;a1)", "(a1;a3)")
    assert code == 2
    code, text = cli("sandwich", "catalog:M3", "(zz;a1)", "(a1;a3)")
    assert code == 2


def test_basis_search_examples():
    code, rep = cli_json("basis-search", "catalog:M3", "-N", "2")
    assert code == 0 and rep["data"]["families"] == 3
    first = rep["data"]["listed"][0]
    assert sorted(first["basis"]) == ["a1", "a2"] and first["axes"] == {"0,1": "a3"}
    code, rep = cli_json("basis-search", SAMPLES / "f2_3.json", "-N", "3")
    assert code == 0 and all(len(x["basis"]) == 3 for x in rep["data"]["listed"])
    code, rep = cli_json("basis-search", "catalog:B2", "-N", "4")
    assert code == 0 and rep["data"]["families"] == 0


def test_basis_search_dle3_flag_both_positions():
    _, a = cli_json("basis-search", "catalog:M3", "-N", "2", "--dle3")
    _, b = cli_json("--dle3", "basis-search", "catalog:M3", "-N", "2")
    assert a["data"]["mode"] == b["data"]["mode"] == "dle3"


def test_coordinatize_examples():
    code, rep = cli_json("coordinatize", SAMPLES / "m3.json", SAMPLES / "m2f2.json")
    assert code == 0 and rep["ok"]
    code, rep = cli_json("coordinatize", SAMPLES / "f2_3.json", "ring:M3F2")
    assert code == 0
    code, rep = cli_json("coordinatize", SAMPLES / "b2.json", SAMPLES / "m2f2.json")
    assert code == 1
    bad = [c for c in rep["checks"] if not c["passed"]]
    assert [c["name"] for c in bad] == ["lattice isomorphic to Omega_L"]


def test_coordinatize_non_regular_ring():
    code, rep = cli_json("coordinatize", SAMPLES / "b2.json", SAMPLES / "z4.json")
    assert code == 1 and rep["checks"][0]["witness"] == "2"


def test_ring_idempotents():
    code, rep = cli_json("ring-idempotents", SAMPLES / "m2f2.json")
    assert code == 0 and rep["data"]["count"] == 8
    code, rep = cli_json("ring-idempotents", "ring:M4F2")
    assert code == 0 and rep["data"]["count"] == 802 == matrix_idempotent_count(2, 4)


def test_omega_lattice_with_basis_and_round_trip(tmp_path):
    out = tmp_path / "omega.json"
    code, rep = cli_json("omega-lattice", "ring:M2F2", "--basis", "E11,E22", "--out", out)
    assert code == 0 and rep["data"]["rank"] == 2
    text = out.read_text()
    L = lattice_from_json(json.loads(text))
    assert L.n == 5 and dumps_canonical(lattice_to_json(L)) == text
    assert rep["data"]["lattice"] == json.loads(text)


def test_omega_lattice_bad_basis_is_finding():
    code, rep = cli_json("omega-lattice", "ring:M2F2", "--basis", "E11")
    assert code == 1


def test_axioms_ring_and_lattice():
    for ref in ("ring:F2", "ring:M2F2", "catalog:M3"):
        code, rep = cli_json("axioms", ref)
        assert code == 0 and len(rep["checks"]) == 13


def test_input_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli("validate", bad)[0] == 2
    assert cli("validate", tmp_path / "missing.json")[0] == 2
    assert cli("validate", "catalog:nope")[0] == 2
    bad.write_text(json.dumps({"n": 5, "covers": [[0, 1], [0, 2], [1, 3], [2, 4]]}))
    code, text = cli("validate", bad)
    assert code == 2 and "join" in text
    bad.write_text(json.dumps({"n": 2, "add": [[0, 1], [1, 1]], "mul": [[0, 0], [0, 1]], "zero": 0, "one": 1}))
    assert cli("validate", bad)[0] == 2
    assert cli("ring-idempotents", "catalog:M3")[0] == 2
    assert cli("ring-idempotents", "ring:M4F2", "--cap", "100")[0] == 2


@pytest.mark.parametrize("argv", [
    ["validate", "samples/n5.json"],
    ["biorder", "catalog:F2^3"],
    ["sandwich", "catalog:F2^3", "(<010,001>;<100>)", "(<100,001>;<010>)"],
    ["coordinatize", "samples/m3.json", "samples/m2f2.json"],
    ["basis-search", "catalog:F2^3", "-N", "3"],
])
@pytest.mark.parametrize("fmt", [[], ["--json"]])
def test_reports_are_byte_identical(argv, fmt, monkeypatch):
    monkeypatch.chdir(SAMPLES.parent)
    first = run(argv + fmt)
    second = run(argv + fmt)
    assert first == second


def test_json_report_round_trips():
    _, text = cli("coordinatize", SAMPLES / "m3.json", SAMPLES / "m2f2.json", "--json")
    assert json.dumps(json.loads(text), sort_keys=True, indent=2, ensure_ascii=False) + "\n" == text


def test_timings_opt_in():
    _, rep = cli_json("validate", "catalog:M3")
    assert "timings" not in rep
    _, text = cli("validate", "catalog:M3", "--json", "--timings")
    assert "total" in json.loads(text)["timings"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cmlcoord", "validate", "catalog:N5"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "FAIL modular" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "cmlcoord", "validate", "catalog:XX"],
                          capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stderr.startswith("error:")
