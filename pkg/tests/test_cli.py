import json
import os
import subprocess
import sys

import pytest

from aritylab import corpus
from aritylab.cli import main
from aritylab.structures import parse_structure


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def z3_file(tmp_path):
    p = tmp_path / "z3.struct"
    p.write_text(corpus.text("Z3"))
    return str(p)


def test_validate_group(capsys, z3_file):
    doc = run_json(capsys, "validate", z3_file)
    assert doc["classification"]["kind"] == "group"
    assert doc["warnings"] == []


def test_validate_flat_monoid_warns(capsys):
    code, out, err = run(capsys, "validate", "corpus:flat_monoid_3")
    assert code == 0
    assert "not associative" in err
    assert json.loads(out)["warnings"]


def test_validate_malformed_reports_location(capsys, tmp_path):
    p = tmp_path / "bad.struct"
    p.write_text("structure bad\nuniverse 3\nfunction f 1\n0 1 5\nend\n")
    code, _, err = run(capsys, "validate", str(p))
    assert code == 2
    assert "line 4" in err and "column 5" in err


def test_missing_file_is_input_error(capsys, tmp_path):
    assert run(capsys, "validate", str(tmp_path / "nope.struct"))[0] == 2
    assert run(capsys, "validate", "corpus:nope")[0] == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["arity"])
    assert info.value.code == 1
    assert run(capsys, "family", "cyclic", "--sweep", "5..2")[0] == 1
    assert run(capsys, "family", "nosuch", "--sweep", "2..3")[0] == 1
    assert run(capsys, "arity", "corpus:Z3", "--threads", "0")[0] == 1


def test_budget_exit(capsys):
    assert run(capsys, "arity", "corpus:Z6", "--max-tuples", "100")[0] == 3
    assert run(capsys, "arity", "corpus:Z6", "--aut-cap", "4")[0] == 3


def test_non_invariant_relation_is_input_error(capsys, tmp_path):
    p = tmp_path / "r.struct"
    p.write_text("structure r\nuniverse 3\nfunction mul 2\n0 1 2\n1 2 0\n2 0 1\nrelation R 1\ntuples 1\n1\nend\n")
    # R is part of the structure, so it is invariant by construction
    assert run(capsys, "rel-arity", str(p), "--relation", "R")[0] == 0
    assert run(capsys, "rel-arity", str(p), "--relation", "S")[0] == 2


def test_arity_z2(capsys):
    doc = run_json(capsys, "arity", "corpus:Z2")
    assert doc["arity"]["theory_arity"] == 1 and doc["arity"]["exact"]
    assert doc["arity"]["source"] == "engine"
    assert doc["version"] and "config" in doc


def test_arity_flat_monoid_with_oracle(capsys):
    doc = run_json(capsys, "arity", "corpus:flat_monoid_3", "--oracle")
    assert doc["arity"]["theory_arity"] == 1
    assert doc["oracle"]["agrees"] and doc["oracle"]["source"] == "oracle"


def test_arity_bound_on_corpus(capsys):
    for name in corpus.names():
        doc = run_json(capsys, "arity", f"corpus:{name}")
        assert doc["arity"]["bound_holds"], name


def test_rel_arity(capsys):
    assert run_json(capsys, "rel-arity", "corpus:Z2", "--graph-of", "mul")["result"]["relation_arity"] == 1
    doc = run_json(capsys, "rel-arity", "corpus:Z5", "--graph-of", "mul", "--oracle")
    assert doc["result"]["relation_arity"] == 2 == doc["oracle"]["relation_arity"]
    edge = run_json(capsys, "rel-arity", "corpus:C5", "--relation", "E")
    assert edge["result"]["relation_arity"] == 2


def test_rel_arity_hypotheses(capsys):
    doc = run_json(capsys, "rel-arity", "corpus:Z5", "--graph-of", "mul", "--power", "3", "--check-hypotheses")
    h = doc["hypotheses"]
    assert h["condition1"] and h["condition2"]
    assert h["sol_bound"] == 1 and h["cofinite_slack"] == 0
    assert "not desk-testable" in h["conclusion"]


def test_power_needs_graph(capsys):
    assert run(capsys, "rel-arity", "corpus:C5", "--relation", "E", "--power", "2")[0] == 1


def test_expand_singletons(capsys, tmp_path):
    out = tmp_path / "z3s.struct"
    doc = run_json(capsys, "expand", "corpus:Z3", "--mode", "singletons", "--emit", str(out))
    assert doc["arity"]["theory_arity"] == 1
    assert any("singleton" in n for n in doc["expansion"]["notes"])
    emitted = parse_structure(out.read_text())
    assert [s.name for s in emitted.signature.of_kind("relation")] == ["P_0", "P_1", "P_2"]


def test_expand_finite_range(capsys):
    doc = run_json(capsys, "expand", "corpus:finite_range_3_2", "--mode", "finite-range")
    assert doc["arity"]["theory_arity"] <= 2
    assert [a["name"] for a in doc["expansion"]["added"]] == ["D_1", "D_2", "R_1", "R_2"]


def test_expand_general(capsys, tmp_path):
    out = tmp_path / "g.struct"
    doc = run_json(capsys, "expand", "corpus:flat_monoid_2", "--mode", "general", "--emit", str(out))
    names = [a["name"] for a in doc["expansion"]["added"]]
    assert names == ["D_1_1", "D_2_1", "D_3_1", "R_1", "R_2", "R_3"]
    assert "D_1_1" in out.read_text()
    assert run(capsys, "expand", "corpus:Z3", "--mode", "general", "--include-identity")[0] == 1


def test_family_flat_monoid(capsys):
    doc = run_json(capsys, "family", "flat-monoid", "--sweep", "2..5")
    assert [r["theory_arity"] for r in doc["rows"]] == [1, 1, 1, 1]
    assert all(r["expanded_arity"] <= 2 for r in doc["rows"])


def test_family_cyclic_and_finite_range(capsys):
    doc = run_json(capsys, "family", "cyclic", "--sweep", "2..6")
    assert all(r["theory_arity"] <= r["size"] and r["exact"] for r in doc["rows"])
    doc = run_json(capsys, "family", "finite-range", "--params", "r=2", "--sweep", "3..5")
    assert all(r["expanded_arity"] <= 2 for r in doc["rows"])
    assert doc["notes"]


def test_table_format(capsys):
    code, out, _ = run(capsys, "arity", "corpus:S3", "--format", "table")
    assert code == 0
    assert "theory arity: 3 (exact: True)" in out
    code, out, _ = run(capsys, "corpus", "--format", "table")
    assert "flat_monoid_2" in out


def test_timings_only_on_request(capsys):
    plain = run_json(capsys, "arity", "corpus:Z4")
    timed = run_json(capsys, "arity", "corpus:Z4", "--timings")
    assert "seconds" not in json.dumps(plain)
    assert "seconds" in json.dumps(timed)


def test_output_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "arity", "corpus:Z3", "-o", str(out))
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["arity"]["theory_arity"] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["arity", "corpus:S3"],
        ["arity", "corpus:Z6"],
        ["expand", "corpus:finite_range_4_2", "--mode", "finite-range"],
        ["family", "cyclic", "--sweep", "2..5"],
    ],
)
def test_byte_identical_across_thread_counts(capsys, argv):
    outs = []
    for threads in ("1", str(max(4, os.cpu_count() or 1))):
        code, out, _ = run(capsys, *argv, "--threads", threads)
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]


def test_console_entry_point(tmp_path):
    env = dict(os.environ, ARITYLAB_MAX_TUPLES="100")
    proc = subprocess.run(
        [sys.executable, "-m", "aritylab.cli", "arity", "corpus:Z6"], capture_output=True, text=True, env=env
    )
    assert proc.returncode == 3
    proc = subprocess.run(
        [sys.executable, "-m", "aritylab.cli", "arity", "corpus:Z3"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["arity"]["theory_arity"] == 1
