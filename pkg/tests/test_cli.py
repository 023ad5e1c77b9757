import json
import subprocess
import sys

import pytest

from gl1hom.cli import main

SMALL_CORPUS = (
    "name,braid,expected,expected_total_rank\n"
    "3_1,AAA,1 + t^2q^-4 + tq^-4,3\n"
    "4_1,AbAb,q^2 + q^2t^-1 + 1 + tq^-2 + q^-2,5\n"
    "5_1,AAAAA,1 + t^2q^-4 + tq^-4 + t^4q^-8 + t^3q^-8,5\n"
)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_text(capsys):
    assert run(capsys, "compute", "AAA") == (0, "1 + t^2q^-4 + tq^-4\n", "")


def test_compute_json(capsys):
    code, out, _ = run(capsys, "compute", "AbAb", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["braid"] == "AbAb" and data["characteristic"] == 0
    assert data["total_rank"] == 5
    assert data["poincare"][0] == {"t": 0, "q": 2, "dim": 1}
    assert set(data["calibration"]) == {"q_shift", "hom_shift", "v_weight", "mirror"}


def test_compute_char3_outputs_differ(capsys):
    outs = [run(capsys, "compute", "--char", "3", w)[1] for w in ("A", "Ab", "AB")]
    assert len(set(outs)) == 3


@pytest.mark.parametrize("argv", [["compute", ""], ["compute", "A0B"], ["compute", "--char", "4", "A"]])
def test_compute_input_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith("error:")


def test_internal_fault_exit_code(capsys, tmp_path):
    cfg = tmp_path / "zero.json"
    cfg.write_text(json.dumps({"calibration": {"q_shift": [0, 0, 0, 0], "hom_shift": [0, 0, 0, 0], "v_weight": 0, "mirror": False}}))
    code, _, err = run(capsys, "--config", str(cfg), "compute", "A")
    assert code == 3 and "GradingViolation" in err


def test_bad_config_file(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{")
    assert run(capsys, "--config", str(cfg), "compute", "A")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gl1hom", "compute", "AbAb"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "q^2 + q^2t^-1 + 1 + tq^-2 + q^-2\n"


def test_batch_all_match(capsys, tmp_path):
    corpus = tmp_path / "c.csv"
    corpus.write_text(SMALL_CORPUS)
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "batch", str(corpus), "--report", str(report))
    assert code == 0
    assert out.startswith("3 entries: 3 match, 0 mismatch")
    data = json.loads(report.read_text())
    assert [e["status"] for e in data["entries"]] == ["match"] * 3
    assert sum(data["summary"].values()) == 3


def test_batch_report_is_deterministic(capsys, tmp_path):
    corpus = tmp_path / "c.csv"
    corpus.write_text(SMALL_CORPUS)
    texts = []
    for name in ("a.json", "b.json"):
        run(capsys, "batch", str(corpus), "--report", str(tmp_path / name), "--jobs", "2")
        texts.append((tmp_path / name).read_bytes())
    assert texts[0] == texts[1]


def test_batch_mismatch(capsys, tmp_path):
    corpus = tmp_path / "c.csv"
    corpus.write_text("name,braid,expected,expected_total_rank\n3_1,AAA,1 + tq^-4,2\n4_1,AbAb,,\n")
    code, out, _ = run(capsys, "batch", str(corpus), "--report", str(tmp_path / "r.csv"))
    assert code == 1
    assert "MISMATCH 3_1" in out and "1 no-expectation" in out
    rows = (tmp_path / "r.csv").read_text().splitlines()
    assert rows[0] == "name,braid,status,expected,computed"
    assert rows[1].startswith("3_1,AAA,mismatch,")


def test_batch_timeout(capsys, tmp_path):
    corpus = tmp_path / "c.csv"
    corpus.write_text("name,braid,expected,expected_total_rank\nbig,AbAbCbCAbc,,\n3_1,AAA,1 + t^2q^-4 + tq^-4,3\n")
    report = tmp_path / "r.json"
    code, _, _ = run(capsys, "batch", str(corpus), "--timeout", "4", "--report", str(report))
    data = json.loads(report.read_text())
    assert code == 1
    assert [e["status"] for e in data["entries"]] == ["error: timeout", "match"]


def test_batch_file_errors(capsys, tmp_path):
    assert run(capsys, "batch", str(tmp_path / "missing.csv"))[0] == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("name,braid,expected,expected_total_rank\nx,A!,,\n")
    assert run(capsys, "batch", str(bad))[0] == 2


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", "AbA", "--v", "101")
    assert code == 0
    assert out.splitlines()[-1] == "agree"
    assert "000 111       -1       -1" in out
    assert run(capsys, "oracle", "AbA", "--v", "10")[0] == 2


def test_selftest_debug_hooks(capsys, monkeypatch):
    import gl1hom.selftest as st

    # shrink the expensive suites; the hooks only need a few samples to fire
    monkeypatch.setattr(st, "suite_oracle", lambda rng: st.SuiteResult("oracle equivalence", True, "skipped"))
    monkeypatch.setattr(st, "suite_gram", lambda: st.SuiteResult("gram", True, "skipped"))
    code, out, _ = run(capsys, "selftest", "--flip-zip-sign")
    assert code == 1
    assert "FAIL  zip/unzip transpose" in out
    code, out, _ = run(capsys, "selftest", "--zero-calibration")
    assert code == 1 and "GradingViolation" in out
