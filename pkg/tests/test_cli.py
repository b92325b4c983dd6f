import json
import subprocess
import sys

import pytest

from tidykit import catalog, core
from tidykit.cli import cli


def run(capsys, *argv):
    code = cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_s4(capsys):
    code, out, _ = run(capsys, "analyze", "--family", "s4", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["tidy_oracle"] and data["tidy_structural"]
    assert data["case"] == "s4type" and data["fitting_height"] == 3
    assert data["sylow_shapes"] == {"2": ["dihedral"], "3": ["cyclic", "exponent_p"]}


def test_analyze_cyclic_shorthand(capsys):
    code, out, _ = run(capsys, "analyze", "--family", "cyclic:12", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["tidy_oracle"] and data["case"] == "nilpotent"


def test_analyze_table_shows_witness(capsys):
    code, out, _ = run(capsys, "analyze", "--family", "direct_product(s3,cyclic(3))")
    assert code == 0
    assert "tidy_oracle: False" in out and "witness:" in out


def test_analyze_nonsolvable(capsys):
    code, out, _ = run(capsys, "analyze", "--family", "alternating(5)", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["tidy_structural"] is None and data["tidy_oracle"] is True


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--family", "binary_octahedral", "--format", "json")
    assert code == 0 and json.loads(out)["case"] == "gl23tilde"


def test_cyc(capsys):
    G = catalog.build_family("direct_product(s3,cyclic(3))")
    x = next(i for i in range(G.order) if G.ord[i] == 3 and not core.is_subgroup(G, __import__("tidykit").tidy.cyc_set(G, i)))
    code, out, _ = run(capsys, "cyc", "--family", "direct_product(s3,cyclic(3))", "--element", str(x), "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["is_subgroup"] is False
    g, h = data["violating_pair"]
    assert int(G.mul[g, h]) not in data["cyc"]


def test_validate(tmp_path, capsys):
    good = tmp_path / "s3.txt"
    good.write_text("perm 3\n1 0 2\n1 2 0\n")
    assert run(capsys, "validate", "--input", str(good))[0] == 0
    bad = tmp_path / "bad.txt"
    bad.write_text("cayley 3\n0 1 2\n1 2 0\n2 1 0\n")
    code, out, _ = run(capsys, "validate", "--input", str(bad), "--format", "json")
    assert code == 1 and json.loads(out)["valid"] is False


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["analyze"],
        ["analyze", "--family", "nosuch"],
        ["analyze", "--family", "s4", "--input", "x"],
        ["analyze", "--family", "dihedral(4)"],
        ["corpus", "--suites", "nonesuch", "--family", "s3"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(capsys, *argv)[0] == 2


def test_missing_file_is_a_failure(capsys, tmp_path):
    assert run(capsys, "analyze", "--input", str(tmp_path / "missing.txt"))[0] == 1


def test_max_order_flag(capsys, monkeypatch):
    monkeypatch.delenv("TIDYKIT_MAX_ORDER", raising=False)
    code, _, err = run(capsys, "analyze", "--family", "s4", "--max-order", "10")
    assert code == 1 and "exceeds" in err


def test_corpus_writes_report(tmp_path, capsys):
    out = tmp_path / "report.jsonl"
    code, text, _ = run(capsys, "corpus", "--family", "s4", "--family", "s3", "--suites", "pgroups,hall_pairs",
                        "--out", str(out), "--no-timing")
    assert code == 0 and "hall_pairs" in text
    lines = [json.loads(x) for x in out.read_text().splitlines()]
    assert [x["label"] for x in lines if "label" in x] == ["s4", "s3"]


def test_corpus_failure_exit_and_repro(capsys):
    code, text, _ = run(capsys, "corpus", "--family", "direct_product(sl2_3,cyclic(9))", "--suites", "two_three_extension")
    assert code == 1
    repro = next(line.split("repro: ")[1] for line in text.splitlines() if "repro:" in line)
    argv = [a.strip("'") for a in repro.split()[1:]]
    assert run(capsys, *argv)[0] == 1


def test_list_suites(capsys):
    code, out, _ = run(capsys, "corpus", "--list-suites")
    assert code == 0 and len(out.splitlines()) == 15


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tidykit", "classify", "--family", "s3"], capture_output=True, text=True)
    assert proc.returncode == 0 and "hyperfrobenius" in proc.stdout
