import numpy as np
import pytest

from kernorm.harness.experiment import CSV_COLUMNS, ResultRow
from kernorm.harness.report import emit_report, format_value, rows_to_csv


def row(**kw):
    base = dict(experiment="demo", method="lmmd", n=500, B=250, d=25, alpha=0.05, rejection_rate=0.035,
                replicates=200, mean_elapsed_ms=None, seed=7)
    base.update(kw)
    return ResultRow(**base)


def test_single_row_csv(tmp_path):
    paths = emit_report([row()], tmp_path, ("csv",))
    text = paths[0].read_bytes().decode("ascii")
    assert text == ",".join(CSV_COLUMNS) + "\n" + "demo,lmmd,500,250,25,0.05,0.035,200,nan,7\n"
    assert "\r" not in text


def test_number_formatting():
    assert format_value(1 / 3) == "0.333333"
    assert format_value(123456789.0) == "1.23457e+08"
    assert format_value(np.float64(0.1) + np.float64(0.2)) == "0.3"
    assert format_value(None) == "nan"
    assert format_value(np.int64(4)) == "4"


def test_type1_chart_has_alpha_reference(tmp_path):
    rows = [row(B=B, rejection_rate=r, method=m) for m in ("lmmd", "lmmda") for B, r in ((50, 0.04), (100, 0.045))]
    paths = emit_report(rows, tmp_path, ("csv", "svg"))
    svg = [p for p in paths if p.suffix == ".svg"][0].read_text()
    assert svg.startswith("<?xml")
    assert "alpha = 0.05" in svg
    assert "L-MMDa" in svg


def test_exec_time_chart_is_log_log_with_slopes(tmp_path):
    rows = [row(experiment="timing", method=m, n=n, measure="time", replicates=1,
                mean_elapsed_ms=(n / 500) ** p * 10) for m, p in (("lmmd", 2), ("lmmda", 3)) for n in (500, 1000, 2000)]
    paths = emit_report(rows, tmp_path, ("svg",))
    svg = paths[0].read_text()
    assert "slope 2.00" in svg and "slope 3.00" in svg


def test_charts_and_csv_are_byte_stable(tmp_path):
    rows = [row(n=n, rejection_rate=0.5 / i, measure="type2") for i, n in enumerate((100, 200, 300), 1)]
    a = emit_report(rows, tmp_path / "a", ("csv", "svg"))
    b = emit_report(rows, tmp_path / "b", ("csv", "svg"))
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()


def test_one_csv_per_experiment(tmp_path):
    paths = emit_report([row(), row(experiment="other")], tmp_path, ("csv",))
    assert sorted(p.name for p in paths) == ["demo.csv", "other.csv"]
    assert rows_to_csv([row()]).count("\n") == 2


def test_report_errors(tmp_path):
    with pytest.raises(ValueError):
        emit_report([], tmp_path)
    with pytest.raises(ValueError):
        emit_report([row()], tmp_path, ("pdf",))
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        emit_report([row()], blocker / "sub", ("csv",))
