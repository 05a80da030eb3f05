"""Unit tests for the figure tool: CSV schema, aggregation, rendering, CLI."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

plotkit = pytest.importorskip("plotkit")

from plotkit import EXPECTED_HEADER, PlotSpec, SchemaError, aggregate, build_figure, read_rows, render
from plotkit.cli import EXIT_IO, EXIT_OK, EXIT_SCHEMA, main

HEADER = ",".join(EXPECTED_HEADER)


def write_csv(path: Path, rows: list[tuple]) -> Path:
    lines = [HEADER]
    for r in rows:
        lines.append(",".join(str(x) for x in r))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def sample_rows(axis_name: str = "power") -> list[tuple]:
    rows = []
    for scheme in ("robust", "nonrobust"):
        for sigma2 in (0.01, 0.05):
            for i, axis in enumerate((0.0, 10.0, 20.0)):
                for trial in range(3):
                    mse = 0.5 / (1.0 + axis) + 0.01 * trial + (0.1 if scheme == "nonrobust" else 0.0)
                    rows.append((scheme, axis_name, axis, sigma2, trial, mse, 5, "true", 12.5))
    return rows


# ---------------------------------------------------------------------------
# reading and schema errors
# ---------------------------------------------------------------------------


def test_read_rows_round_trip(tmp_path):
    path = write_csv(tmp_path / "r.csv", [("robust", "power", 10.0, 0.05, 0, 0.25, 7, "false", 3.5)])
    (row,) = read_rows(path)
    assert row.scheme == "robust"
    assert row.axis_name == "power"
    assert row.axis_value == 10.0
    assert row.sigma2 == 0.05
    assert row.trial == 0
    assert row.mse == 0.25
    assert row.iters == 7
    assert row.converged is False
    assert row.millis == 3.5


def test_empty_file_is_schema_error(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")
    with pytest.raises(SchemaError, match="no header") as exc:
        read_rows(path)
    assert exc.value.column == "scheme"


def test_renamed_column_names_the_expected_one(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text(HEADER.replace("sigma2", "sigma") + "\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="'sigma'") as exc:
        read_rows(path)
    assert exc.value.column == "sigma2"


def test_missing_last_column_is_named(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text(HEADER.rsplit(",", 1)[0] + "\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="missing") as exc:
        read_rows(path)
    assert exc.value.column == "millis"


def test_extra_column_is_named(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text(HEADER + ",bonus\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="extra") as exc:
        read_rows(path)
    assert exc.value.column == "bonus"


def test_short_row_is_schema_error(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text(HEADER + "\nrobust,power,10.0\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="3 fields"):
        read_rows(path)


def test_bad_number_names_its_column(tmp_path):
    path = write_csv(tmp_path / "r.csv", [("robust", "power", "ten", 0.05, 0, 0.25, 7, "true", 3.5)])
    with pytest.raises(SchemaError, match="row 2") as exc:
        read_rows(path)
    assert exc.value.column == "axis_value"


def test_bad_flag_names_converged(tmp_path):
    path = write_csv(tmp_path / "r.csv", [("robust", "power", 10.0, 0.05, 0, 0.25, 7, "True", 3.5)])
    with pytest.raises(SchemaError, match="true/false") as exc:
        read_rows(path)
    assert exc.value.column == "converged"


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------


def test_aggregate_matches_hand_statistics(tmp_path):
    rows = read_rows(write_csv(tmp_path / "r.csv", [
        ("robust", "power", 0.0, 0.05, 0, 0.1, 5, "true", 1.0),
        ("robust", "power", 0.0, 0.05, 1, 0.2, 5, "true", 1.0),
        ("robust", "power", 0.0, 0.05, 2, 0.3, 5, "true", 1.0),
        ("robust", "power", 10.0, 0.05, 0, 0.05, 5, "true", 1.0),
    ]))
    series = aggregate(rows)
    (points,) = series.values()
    assert [p.axis_value for p in points] == [0.0, 10.0]
    assert points[0].mean == pytest.approx(0.2, rel=1e-15)
    assert points[0].stderr == pytest.approx(np.std([0.1, 0.2, 0.3], ddof=1) / math.sqrt(3), rel=1e-15)
    assert points[0].count == 3
    assert points[1] == plotkit.SeriesPoint(axis_value=10.0, mean=0.05, stderr=0.0, count=1)


def test_aggregate_splits_series_by_scheme_and_level(tmp_path):
    rows = read_rows(write_csv(tmp_path / "r.csv", sample_rows()))
    series = aggregate(rows)
    assert set(series) == {(s, e) for s in ("robust", "nonrobust") for e in (0.01, 0.05)}
    assert all(len(points) == 3 for points in series.values())


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def test_series_and_legend_cardinality(tmp_path):
    path = write_csv(tmp_path / "r.csv", sample_rows())
    fig = build_figure(PlotSpec(csv_in=path, kind="power", image_out=tmp_path / "f.png"))
    ax = fig.axes[0]
    assert len(ax.lines) == 4  # 2 schemes x 2 error levels
    labels = [t.get_text() for t in ax.get_legend().get_texts()]
    assert len(labels) == 4
    assert any("robust" in lbl for lbl in labels)
    assert any("0.05" in lbl for lbl in labels)
    assert ax.get_xlabel() == "transmit power (dBm)"
    assert ax.get_ylabel() == "average MSE"
    assert ax.get_yscale() == "linear"


def test_reciprocal_mse_plots_strictly_decreasing_means(tmp_path):
    rows = []
    for axis in (10, 20, 40, 60):
        for trial in range(2):
            rows.append(("robust", "elements", float(axis), 0.05, trial, 1.0 / axis, 3, "true", 0.0))
    path = write_csv(tmp_path / "r.csv", rows)
    fig = build_figure(PlotSpec(csv_in=path, kind="elements", image_out=tmp_path / "f.png"))
    (line,) = fig.axes[0].lines
    y = line.get_ydata()
    assert all(b < a for a, b in zip(y, y[1:]))
    assert list(line.get_xdata()) == [10.0, 20.0, 40.0, 60.0]


def test_header_only_csv_warns_and_renders_empty_axes(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER + "\n", encoding="utf-8")
    out = tmp_path / "fig.png"
    with pytest.warns(UserWarning, match="no data rows"):
        render(PlotSpec(csv_in=path, kind="power", image_out=out))
    assert out.exists() and out.stat().st_size > 0


def test_kind_must_match_csv_axis(tmp_path):
    path = write_csv(tmp_path / "r.csv", sample_rows(axis_name="power"))
    with pytest.raises(ValueError, match="'elements'.*power"):
        build_figure(PlotSpec(csv_in=path, kind="elements", image_out=tmp_path / "f.png"))


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(ValueError, match="unknown figure kind"):
        PlotSpec(csv_in=tmp_path / "r.csv", kind="surface", image_out=tmp_path / "f.png")


def test_logy_flag_switches_scale(tmp_path):
    path = write_csv(tmp_path / "r.csv", sample_rows())
    spec = PlotSpec(csv_in=path, kind="power", image_out=tmp_path / "f.png", logy=True)
    assert build_figure(spec).axes[0].get_yscale() == "log"


def test_rerender_is_pixel_identical(tmp_path):
    path = write_csv(tmp_path / "r.csv", sample_rows())
    out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
    render(PlotSpec(csv_in=path, kind="power", image_out=out1))
    render(PlotSpec(csv_in=path, kind="power", image_out=out2))
    assert out1.read_bytes() == out2.read_bytes()


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def test_cli_renders_figure(tmp_path, capsys):
    path = write_csv(tmp_path / "r.csv", sample_rows())
    out = tmp_path / "fig.png"
    code = main(["plot", "--in", str(path), "--kind", "power", "--out", str(out)])
    assert code == EXIT_OK
    assert out.exists() and out.stat().st_size > 0
    assert "wrote" in capsys.readouterr().out


def test_cli_schema_error_names_column(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER.replace("mse", "score") + "\n", encoding="utf-8")
    code = main(["plot", "--in", str(path), "--kind", "power", "--out", str(tmp_path / "f.png")])
    assert code == EXIT_SCHEMA
    assert "'mse'" in capsys.readouterr().err


def test_cli_kind_mismatch_is_schema_exit(tmp_path, capsys):
    path = write_csv(tmp_path / "r.csv", sample_rows(axis_name="elements"))
    code = main(["plot", "--in", str(path), "--kind", "power", "--out", str(tmp_path / "f.png")])
    assert code == EXIT_SCHEMA
    assert "power" in capsys.readouterr().err


def test_cli_missing_input_is_io_exit(tmp_path, capsys):
    code = main(["plot", "--in", str(tmp_path / "nope.csv"), "--kind", "power",
                 "--out", str(tmp_path / "f.png")])
    assert code == EXIT_IO
    assert "error" in capsys.readouterr().err


def test_cli_rejects_unknown_kind(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["plot", "--in", "r.csv", "--kind", "bogus", "--out", "f.png"])
    assert exc.value.code == 2
