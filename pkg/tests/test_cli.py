import json
import re
import shutil
import subprocess

import pytest

from alexarr import DATA_DIR
from alexarr.cli import JobSpec, main, run


def data(name: str) -> str:
    return str(DATA_DIR / name)


def chen(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def theta_table(text: str) -> dict:
    """Parse the 'k theta_k theta^cc_k' table of a report."""
    rows = {}
    for m in re.finditer(r"^\s+(\d+)\s+(\S+)\s+(\S+)$", text, re.M):
        rows[int(m.group(1))] = (m.group(2), m.group(3))
    return rows


def test_six_lines_example(capsys):
    code, out, _ = chen(capsys, "--arrangement", data("sixlines.arr"), "--central", "--decone", "3", "-K", "8")
    assert code == 0
    table = theta_table(out)
    assert table[1][0] == "6"
    assert all(table[k][0] == str(3 * (k - 1)) for k in range(2, 9))
    assert "verdict: decomposable" in out


def test_maclane_lattice_example(capsys):
    code, out, _ = chen(capsys, "--lattice", data("maclane.lat"))
    assert code == 0
    table = theta_table(out)
    assert table[3] == ("21", "16")
    assert "verdict: not decomposable" in out
    assert table[4][0] == "-"  # not determined by the lattice alone


def test_diamond_monodromy_example(capsys):
    code, out, _ = chen(capsys, "--monodromy", data("diamond.mono"), "-K", "8")
    assert code == 0
    table = theta_table(out)
    assert table[3][0] == "17"
    assert all(table[k][0] == str(9 * (k - 1)) for k in range(4, 9))


def test_verify_reports_agreement(capsys):
    code, out, _ = chen(capsys, "--arrangement", data("sixlines.arr"), "--central", "--decone", "3", "-K", "6",
                        "--verify")
    assert code == 0
    assert "MISMATCH" not in out
    assert "AGREE groebner-vs-oracle[real] k=6: 15 = 15" in out
    assert "AGREE real-vs-general k=4: 9 = 9" in out
    assert out.rstrip().endswith("verification: all checks agree")


def test_lattice_only_verify(capsys):
    code, out, _ = chen(capsys, "--lattice", data("braid_a4.lat"), "--verify")
    assert code == 0
    assert "AGREE theta2-formula" in out


def test_pappus_pair_side_by_side(capsys):
    code, out, _ = chen(capsys, "--arrangement", data("pappus1.arr"), data("pappus2.arr"), "--central", "-K", "5")
    assert code == 0
    cmp = out[out.index("comparison of theta_k:"):]
    rows = {int(r.split()[0]): r.split()[1:] for r in cmp.splitlines()[2:] if r.strip()[:1].isdigit()}
    assert rows[2] == ["9", "9"]
    assert rows[3] == ["20", "18"]
    assert "profiles differ at k = 3, 4, 5" in cmp


def test_json_output(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, _, _ = chen(capsys, "--lattice", data("maclane.lat"), "--json", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["theta_cc"]["3"] == 16
    assert doc["theta3_lattice"] == 21
    assert doc["decomposable"] is False
    assert doc["psi3"]["coker_free_rank"] == 5
    assert doc["lattice"]["b2"] == 20


def test_json_for_several_inputs_is_a_list(tmp_path, capsys):
    path = tmp_path / "both.json"
    chen(capsys, "--lattice", data("sixlines.lat"), data("braid_a4.lat"), "--json", str(path))
    doc = json.loads(path.read_text())
    assert [d["decomposable"] for d in doc] == [True, False]


def test_reports_are_deterministic(tmp_path, capsys):
    args = ["--arrangement", data("diamond.arr"), "--central", "--decone", "7", "-K", "5", "--verify"]
    outs = []
    for i in range(2):
        js = tmp_path / f"r{i}.json"
        code, out, _ = chen(capsys, *args, "--json", str(js))
        assert code == 0
        outs.append((out, js.read_bytes()))
    assert outs[0] == outs[1]


def test_corrupted_presentation_is_detected(tmp_path, capsys):
    saved = tmp_path / "six.pres"
    code, _, _ = chen(capsys, "--arrangement", data("sixlines.arr"), "--central", "-K", "5",
                      "--write-presentation", str(saved))
    assert code == 0
    code, out, _ = chen(capsys, "--presentation", str(saved), "-K", "5", "--verify")
    assert code == 0 and "AGREE recorded k=5" in out
    # drop one relation: the module grows and the recorded ranks no longer match
    lines = saved.read_text().splitlines()
    first = next(i for i, ln in enumerate(lines) if ln.startswith("relation"))
    del lines[first]
    saved.write_text("\n".join(lines) + "\n")
    code, out, _ = chen(capsys, "--presentation", str(saved), "-K", "5", "--verify")
    assert code == 1
    assert "MISMATCH recorded" in out
    assert "verification: FAILED" in out


@pytest.mark.parametrize("kind,text,message", [
    ("lattice", "4\n{1,2\n", "line 2"),
    ("monodromy", "3\nT{1,2}\nT{1,7}\n", "line 3"),
    ("arrangement", "1 0 0\n0 1\n", "line 2"),
    ("presentation", "presentation\nvariables 2\ngenerators g\nrelation r :: t1 ; t2\n", "line 4"),
])
def test_parse_errors_exit_2(tmp_path, capsys, kind, text, message):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    code, out, err = chen(capsys, f"--{kind}", str(path))
    assert code == 2 and out == ""
    assert err.startswith("chen: error:") and message in err


def test_precondition_errors_exit_2(tmp_path, capsys):
    code, _, err = chen(capsys, "--lattice", str(tmp_path / "missing.lat"))
    assert code == 2 and "chen: error:" in err
    affine = tmp_path / "two.arr"
    affine.write_text("1 -1 0\n1 1 0\n")
    code, _, err = chen(capsys, "--arrangement", str(affine), "--decone", "1")
    assert code == 2 and "central" in err
    code, _, err = chen(capsys, "--arrangement", data("sixlines.arr"), "--central", "-K", "6", "--truncate", "2")
    assert code == 2 and "truncation" in err


def test_affine_input_is_coned(tmp_path, capsys):
    # x = 0, x = 1, y = 0: the complement is (C minus two points) x C*, with group F_2 x Z
    path = tmp_path / "three.arr"
    path.write_text("1 0 0\n1 0 1\n0 1 0\n")
    code, out, _ = chen(capsys, "--arrangement", str(path), "-K", "6", "--verify")
    assert code == 0
    table = theta_table(out)
    assert table[1][0] == "3"
    assert all(table[k][0] == str(k - 1) for k in range(2, 7))
    assert "{1,2,4}" in out  # the parallel pair meets the line at infinity


def test_jobspec_validation():
    with pytest.raises(ValueError):
        JobSpec("picture", "x")
    with pytest.raises(ValueError):
        JobSpec("lattice", "x", K=1)


def test_run_returns_structured_report():
    rep = run(JobSpec("lattice", data("braid_a4.lat")))
    assert rep.data["theta"] == {"1": 6, "2": 4, "3": 10}
    assert rep.data["psi3"]["rank"] == 14


@pytest.mark.skipif(shutil.which("chen") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["chen", "--lattice", data("sixlines.lat")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verdict: decomposable" in proc.stdout
