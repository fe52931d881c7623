import subprocess
import sys

import pytest

from kernorm import __version__
from kernorm.harness.cli import main


def test_version(capsys):
    assert main(["version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "kernorm", "version"], capture_output=True, text=True, check=True)
    assert out.stdout.strip() == f"kernorm {__version__}"


def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    assert "type1_vs_b" in capsys.readouterr().out.split()


def test_test_command_on_synthetic_data(capsys):
    assert main(["test", "--synthetic", "--n", "60", "--d", "3", "--B", "99", "--seed", "4", "--workers", "1"]) == 0
    out = capsys.readouterr().out
    assert "method=lmmd" in out and "reject=" in out


@pytest.mark.parametrize("method", ["lmmda", "rp", "hz", "ed"])
def test_test_command_every_method(method, capsys):
    args = ["test", "--synthetic", "--n", "40", "--d", "2", "--B", "19", "--method", method]
    assert main(args) == 0
    assert f"method={method}" in capsys.readouterr().out


def test_test_command_on_csv(tmp_path, capsys):
    path = tmp_path / "x.csv"
    path.write_text("a,b,label\n" + "\n".join(f"{i % 7},{(i * 3) % 5},{i % 2}" for i in range(30)) + "\n")
    assert main(["test", "--data", str(path), "--label-column", "label", "--keep-labels", "0,1",
                 "--B", "19"]) == 0
    assert "n=30 d=2" in capsys.readouterr().out


def test_experiment_writes_csv_and_svg(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["experiment", "type2_mean_shift", "--replicates", "2", "--n-grid", "60,80", "--B", "19",
                 "--workers", "1", "--out", str(out), "--quiet"])
    assert code == 0
    assert (out / "type2_mean_shift.csv").exists() and (out / "type2_mean_shift.svg").exists()
    lines = (out / "type2_mean_shift.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 3


def test_exit_codes(tmp_path, capsys):
    assert main(["experiment", "no_such_preset"]) == 2
    assert main(["experiment", "type1_vs_b", "--B", "10", "--out", str(tmp_path)]) == 2
    assert main(["experiment", "type1_vs_b", "--format", "pdf", "--out", str(tmp_path)]) == 2
    assert main(["test", "--data", str(tmp_path / "missing.csv")]) == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,x\n")
    assert main(["test", "--data", str(bad)]) == 3
    big = tmp_path / "big.csv"
    big.write_text("40\n40\n40\n")
    assert main(["test", "--data", str(big), "--null", "known", "--B", "19"]) == 4
    err = capsys.readouterr().err
    assert "row 2" in err and "column 2" in err


def test_real_data_preset_needs_a_file(tmp_path):
    assert main(["experiment", "digits_236", "--out", str(tmp_path), "--quiet"]) == 2


def test_workers_env_default(monkeypatch, tmp_path):
    monkeypatch.setenv("KERNORM_WORKERS", "2")
    from kernorm._seeding import default_workers

    assert default_workers() == 2


def test_oracle_command(capsys):
    assert main(["oracle", "null_norm", "statistic", "order_statistic"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 3
    assert main(["oracle", "nonsense"]) == 2


def test_bound_command(capsys):
    assert main(["bound", "--L", "0.5", "--M", "1", "--m2", "1", "--q", "5", "--n-grid", "10,100"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,bound"
    assert lines[1] == "10,nan"
    assert lines[2] == "100,0.254786"
    assert main(["bound", "--L", "0.5", "--M", "1", "--m2", "1", "--q", "5", "--n-grid", "100",
                 "--c-p0", "10"]) == 0
    assert float(capsys.readouterr().out.splitlines()[1].split(",")[1]) > 0.254786
