import json
import subprocess
import sys

import pytest

from biloewner import io
from biloewner.cli import main
from suite import s1, s1_gen


@pytest.fixture
def files(tmp_path):
    io.save_system(tmp_path / "s.json", s1())
    io.save_generator(tmp_path / "g.json", s1_gen())
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_scalar(files, capsys):
    code, out, _ = run(capsys, "validate", "--system", files / "s.json")
    assert code == 0
    assert json.loads(out)["spectral_abscissa"] == pytest.approx(-1.0)


def test_validate_malformed_system_exits_one(tmp_path, capsys):
    (tmp_path / "bad.json").write_text(json.dumps(
        {"E": [[1, 0], [0, 1]], "A": [[-1, 0], [0, -1]], "N": [[0, 0], [0, 0]],
         "B": [[1], [1], [1]], "C": [[1, 1]]}))
    code, out, err = run(capsys, "validate", "--system", tmp_path / "bad.json")
    assert code == 1
    assert json.loads(out)["errors"]
    assert json.loads(err)["error"]


def test_interpolation_check_on_scalar_setup(files, capsys):
    rom = files / "rom.json"
    code, _, _ = run(capsys, "reduce", "blf", "--system", files / "s.json", "--generator",
                     files / "g.json", "--kappa", 2, "--svd-tol", 1e-10, "--out", rom)
    assert code == 0
    meta = json.loads(rom.read_text())["meta"]
    assert meta["svd_rel_tol"] == 1e-10 and meta["tuples"]["right"]
    code, out, _ = run(capsys, "check", "interpolation", "--system", files / "s.json", "--rom", rom,
                       "--generator", files / "g.json", "--kappa", 2, "--tol", 1e-8)
    assert code == 0
    assert json.loads(out)["verdict"] == "pass"


def test_unknown_flag_is_usage_error(files, capsys):
    with pytest.raises(SystemExit) as info:
        main(["validate", "--system", str(files / "s.json"), "--bogus"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_missing_file_is_domain_error(tmp_path, capsys):
    code, _, err = run(capsys, "validate", "--system", tmp_path / "nope.json")
    assert code == 1
    assert json.loads(err)["error"] == "FileNotFoundError"


def test_resonant_reduction_is_domain_error(files, capsys):
    code, _, err = run(capsys, "reduce", "mm", "--system", files / "s.json", "--generator",
                       files / "g.json", "--kappa", 3, "--out", files / "mm.json")
    assert code == 1
    assert json.loads(err)["error"] == "ResonanceError"


def test_check_kappa_with_mm_model(files, capsys):
    mm = files / "mm.json"
    assert run(capsys, "reduce", "mm", "--system", files / "s.json", "--generator", files / "g.json",
               "--kappa", 2, "--out", mm)[0] == 0
    code, out, _ = run(capsys, "check", "kappa", "--a", files / "s.json", "--b", mm,
                       "--generator", files / "g.json", "--kappa", 2, "--tol", 1e-8)
    assert code == 0
    report = json.loads(out)
    assert report["verdict"] == "pass" and report["entries"]


def test_check_kappa_failure_exits_one(files, capsys):
    other = files / "other.json"
    io.save_generator(other, s1_gen(mu=5.0))
    mm = files / "mm.json"
    run(capsys, "reduce", "mm", "--system", files / "s.json", "--generator", other, "--kappa", 1,
        "--out", mm)
    code, out, _ = run(capsys, "check", "kappa", "--a", files / "s.json", "--b", mm,
                       "--generator", files / "g.json", "--kappa", 1, "--tol", 1e-8)
    assert code == 1 and json.loads(out)["verdict"] == "fail"


def test_tf_eval_csv(files, capsys, tmp_path):
    (tmp_path / "p.json").write_text("[[2, 1], [3, 1]]")
    code, out, _ = run(capsys, "tf", "eval", "--system", files / "s.json", "--points",
                       tmp_path / "p.json")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "s1_re,s1_im,s2_re,s2_im,value_re,value_im"
    assert [float(v) for v in lines[1].split(",")][-2:] == pytest.approx([1 / 6, 0])


def test_simulate_and_compare(files, capsys):
    gen = files / "gi.json"
    io.save_generator(gen, s1_gen(1j, 3j))
    mm = files / "mm.json"
    run(capsys, "reduce", "mm", "--system", files / "s.json", "--generator", gen, "--kappa", 2,
        "--out", mm)
    for model, out in ((files / "s.json", "a.csv"), (mm, "b.csv")):
        code, _, _ = run(capsys, "simulate", "--model", model, "--generator", gen, "--zeta0", "0.01",
                         "--horizon", 2, "--dt", 1e-2, "--out", files / out)
        assert code == 0
    assert (files / "a.csv").read_text().startswith("t,u_re,u_im,y_re,y_im\n")
    code, out, _ = run(capsys, "compare", "--a", files / "a.csv", "--b", files / "b.csv",
                       "--transient-fraction", 0.5)
    assert code == 0
    assert json.loads(out)["rms_rel"] < 1e-10


def test_demo_is_deterministic(capsys):
    code1, out1, _ = run(capsys, "demo")
    code2, out2, _ = run(capsys, "demo")
    assert code1 == code2 == 0
    assert out1 == out2
    report = json.loads(out1)
    assert report["interpolation"]["verdict"] == "pass"
    assert report["kappa_equivalence_mm"]["verdict"] == "pass"


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "biloewner", "validate", "--system",
                           str(files / "s.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["errors"] == []
