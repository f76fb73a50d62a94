"""Figure-layer tests.

Inputs are produced by the primary CLI through its public file interface
(subprocess; nothing imported from the primary package), then rendered and
checked structurally: series present, bound curve drawn, fitted slopes
negative, schema mismatches rejected by column name.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from figures import PlotSpec, SchemaError, read_table, render
from figures.scripts import decay_c1_main, decay_c2_main, tradeoff_main


def _run_primary(args: list[str]) -> None:
    proc = subprocess.run([sys.executable, "-m", "robustlab.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


@pytest.fixture(scope="session")
def tradeoff_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "tradeoff_n30.csv"
    _run_primary(["tradeoff", "--n", "30", "--eps", "0.5", "--out", str(path)])
    return str(path)


@pytest.fixture(scope="session")
def decay_c1_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "decay_c1.csv"
    _run_primary(["eval", "--classifier", "majority", "--loss", "std",
                  "--n", "11:201:10", "--out", str(path)])
    return str(path)


@pytest.fixture(scope="session")
def decay_c2_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "decay_c2.csv"
    _run_primary(["eval", "--construction", "c2", "--classifier", "c2-simple",
                  "--loss", "noisy", "--n", "2:8", "--eps", "0.1",
                  "--samples", "50000", "--seed", "9", "--out", str(path)])
    return str(path)


# ---------------------------------------------------------------------------
# reading
# ---------------------------------------------------------------------------


def test_read_table_roundtrip(tradeoff_csv):
    table = read_table(tradeoff_csv)
    assert table.preamble["command"] == "tradeoff"
    assert table.n_rows == 30
    assert table.column("k")[0] == 1.0


def test_read_table_names_missing_columns(tradeoff_csv):
    table = read_table(tradeoff_csv)
    with pytest.raises(SchemaError, match="missing column 'no_such'"):
        table.column("no_such")


def test_read_table_rejects_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(SchemaError):
        read_table(str(path))


# ---------------------------------------------------------------------------
# tradeoff plot
# ---------------------------------------------------------------------------


def test_tradeoff_plot_has_both_series_and_bound_curve(tradeoff_csv, tmp_path):
    out = tmp_path / "tradeoff.png"
    result = render(PlotSpec(input_path=tradeoff_csv, kind="tradeoff",
                             output_path=str(out)))
    assert out.exists() and out.stat().st_size > 0
    assert result.legend == ("standard loss", "adversarial loss", "bound 1 - std^gamma")
    assert len(result.series["std_loss"]) == 30
    # the drawn bound is exactly 1 - std^gamma_valid from the CSV columns
    table = read_table(tradeoff_csv)
    expect = 1 - table.column("std_loss") ** table.column("gamma_valid")
    np.testing.assert_allclose(result.series["bound"], expect, rtol=1e-12)


def test_tradeoff_rendering_is_pure(tradeoff_csv, tmp_path):
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    ra = render(PlotSpec(input_path=tradeoff_csv, kind="tradeoff", output_path=str(a)))
    rb = render(PlotSpec(input_path=tradeoff_csv, kind="tradeoff", output_path=str(b)))
    for key in ra.series:
        np.testing.assert_array_equal(ra.series[key], rb.series[key])
    assert a.read_bytes() == b.read_bytes()


def test_tradeoff_rejects_wrong_construction(decay_c2_csv, tmp_path):
    with pytest.raises(SchemaError, match="construction=c1"):
        render(PlotSpec(input_path=decay_c2_csv, kind="tradeoff",
                        output_path=str(tmp_path / "x.png")))


# ---------------------------------------------------------------------------
# decay plots
# ---------------------------------------------------------------------------


def test_decay_c1_slope_is_negative(decay_c1_csv, tmp_path):
    out = tmp_path / "decay1.png"
    result = render(PlotSpec(input_path=decay_c1_csv, kind="decay_c1",
                             output_path=str(out)))
    assert out.exists()
    assert result.fitted_slope is not None and result.fitted_slope < 0


def test_decay_c2_slope_is_near_minus_ln2(decay_c2_csv, tmp_path):
    out = tmp_path / "decay2.png"
    result = render(PlotSpec(input_path=decay_c2_csv, kind="decay_c2",
                             output_path=str(out)))
    assert result.fitted_slope < 0
    # the noisy loss halves per unit n, so the log-slope sits near -ln 2
    assert result.fitted_slope == pytest.approx(-np.log(2), abs=0.1)


def test_decay_kind_checks_construction(decay_c1_csv, tmp_path):
    with pytest.raises(SchemaError, match="construction=c2"):
        render(PlotSpec(input_path=decay_c1_csv, kind="decay_c2",
                        output_path=str(tmp_path / "x.png")))


def test_schema_mismatch_names_the_column(tradeoff_csv, tmp_path):
    # a tradeoff file lacks the decay schema's 'value' column
    with pytest.raises(SchemaError, match="missing column 'value'"):
        render(PlotSpec(input_path=tradeoff_csv, kind="decay_c1",
                        output_path=str(tmp_path / "x.png")))


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(SchemaError, match="unknown plot kind"):
        PlotSpec(input_path="x.csv", kind="scatter", output_path="y.png")


# ---------------------------------------------------------------------------
# scripts
# ---------------------------------------------------------------------------


def test_tradeoff_script(tradeoff_csv, tmp_path, capsys):
    out = tmp_path / "t.png"
    assert tradeoff_main(["--in", tradeoff_csv, "--out", str(out)]) == 0
    assert out.exists()
    assert "wrote" in capsys.readouterr().out


def test_decay_scripts(decay_c1_csv, decay_c2_csv, tmp_path, capsys):
    assert decay_c1_main(["--in", decay_c1_csv,
                          "--out", str(tmp_path / "d1.png")]) == 0
    assert decay_c2_main(["--in", decay_c2_csv,
                          "--out", str(tmp_path / "d2.svg")]) == 0
    assert "log-slope" in capsys.readouterr().out


def test_script_fails_cleanly_on_schema_mismatch(decay_c1_csv, tmp_path, capsys):
    code = tradeoff_main(["--in", decay_c1_csv, "--out", str(tmp_path / "x.png")])
    assert code == 2
    assert "missing column" in capsys.readouterr().err


def test_script_fails_cleanly_on_empty_input(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text(json.dumps({"command": "tradeoff"}) + "\n")
    code = tradeoff_main(["--in", str(empty), "--out", str(tmp_path / "x.png")])
    assert code == 2
    assert "error" in capsys.readouterr().err
