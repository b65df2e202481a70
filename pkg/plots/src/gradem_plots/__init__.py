"""Offline figure rendering for gradem experiment outputs.

Reads the harness's CSV/JSON files and writes one PNG per figure kind.
All scientific numbers (fits, errors) come from the input files; this
package only draws.
"""

from .io import (
    GRAD_VS_D_COLUMNS,
    STAT_COLUMNS,
    TRAJECTORY_COLUMNS,
    SchemaError,
    read_grad_vs_d_csv,
    read_stat_csv,
    read_trajectory_csv,
)
from .render import FIGURE_KINDS, PlotSpec, build_figure, render

__all__ = [
    "FIGURE_KINDS",
    "GRAD_VS_D_COLUMNS",
    "PlotSpec",
    "STAT_COLUMNS",
    "SchemaError",
    "TRAJECTORY_COLUMNS",
    "build_figure",
    "read_grad_vs_d_csv",
    "read_stat_csv",
    "read_trajectory_csv",
    "render",
]
