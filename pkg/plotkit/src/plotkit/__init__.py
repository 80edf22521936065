"""Rate-plane diagram renderer for gaussdiv trajectory CSVs."""

from .render import (
    DiagramSpec,
    TrajectoryRow,
    read_trajectory,
    region_of,
    render,
    render_svg,
    verify_regions,
)

__version__ = "0.1.0"
