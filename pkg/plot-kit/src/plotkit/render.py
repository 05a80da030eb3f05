"""Figure rendering: one line series per (scheme, error level)."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .data import SchemaError, aggregate, read_rows

#: figure kind -> (required axis_name column value, x-axis label)
KINDS = {
    "power": ("power", "transmit power (dBm)"),
    "elements": ("elements", "reflecting elements"),
}

# pinned style so the same CSV always renders to the same bytes
_FIGSIZE = (6.4, 4.4)
_DPI = 150
_COLORS = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


@dataclass(frozen=True)
class PlotSpec:
    """What to render: input CSV, figure kind, output path, y-axis scale."""

    csv_in: Path
    kind: str
    image_out: Path
    logy: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {sorted(KINDS)}")


def build_figure(spec: PlotSpec) -> Figure:
    """The figure for ``spec``, not yet written to disk.

    Raises :class:`~plotkit.data.SchemaError` if the CSV does not match the
    documented schema, and :class:`ValueError` if the CSV's axis does not
    match the requested figure kind. A header-only CSV yields an empty-axes
    figure and a warning.
    """
    rows = read_rows(spec.csv_in)
    axis_name, x_label = KINDS[spec.kind]
    found_axes = sorted({r.axis_name for r in rows})
    if found_axes and found_axes != [axis_name]:
        raise ValueError(
            f"figure kind {spec.kind!r} needs axis {axis_name!r}, but the CSV holds {found_axes}"
        )
    if not rows:
        warnings.warn(f"{spec.csv_in}: no data rows, rendering empty axes", stacklevel=2)

    fig = Figure(figsize=_FIGSIZE, dpi=_DPI)
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(111)
    for i, ((scheme, sigma2), points) in enumerate(sorted(aggregate(rows).items())):
        color = _COLORS[i % len(_COLORS)]
        x = [p.axis_value for p in points]
        mean = [p.mean for p in points]
        half = [p.stderr for p in points]
        ax.plot(x, mean, marker="o", markersize=4, color=color,
                label=f"{scheme} (error level {sigma2:g})")
        ax.fill_between(x, [m - h for m, h in zip(mean, half)],
                        [m + h for m, h in zip(mean, half)],
                        color=color, alpha=0.2, linewidth=0)
    ax.set_xlabel(x_label)
    ax.set_ylabel("average MSE")
    if spec.logy:
        ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    if rows:
        ax.legend()
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> Path:
    """Render ``spec`` to its output image and return the written path."""
    fig = build_figure(spec)
    out = Path(spec.image_out)
    if out.suffix.lower() == ".png":
        # pin the metadata so identical input gives identical bytes
        fig.savefig(out, metadata={"Software": "plotkit"})
    else:
        fig.savefig(out)
    return out


__all__ = ["KINDS", "PlotSpec", "SchemaError", "build_figure", "render"]
