"""Deterministic rate-plane diagram renderer.

Consumes the trajectory CSV emitted by ``gaussdiv trajectory`` (header
``t,eps,mu,delta,kappa,region``) and draws the three divisibility regions of
the (eps, mu) plane with the trajectory overlaid:

- crosshatched wedge  mu >= |eps|          (completely positive),
- striped wedge       0 <= mu < eps        (positive but not CP),
- white elsewhere                          (not positive).

Rendering the same CSV twice yields byte-identical SVG: no timestamps, fixed
element order, fixed ids, fixed float formatting.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

REGIONS = ("CP", "P_not_CP", "NP")

PATH_COLORS = {
    "CP": "#1a7f37",
    "P_not_CP": "#b45309",
    "NP": "#b91c1c",
}


@dataclass(frozen=True)
class DiagramSpec:
    """Canvas geometry and styling of the diagram."""

    width: int = 720
    height: int = 540
    margin_left: int = 62
    margin_right: int = 18
    margin_top: int = 18
    margin_bottom: int = 46
    pad_fraction: float = 0.1
    arrow_count: int = 6
    png: bool = False


@dataclass(frozen=True)
class TrajectoryRow:
    t: float
    eps: float
    mu: float
    delta: float
    kappa: float
    region: str


def read_trajectory(path: str) -> list[TrajectoryRow]:
    """Parse a trajectory CSV; malformed or empty files raise ValueError."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty CSV: missing header") from None
        if header != ["t", "eps", "mu", "delta", "kappa", "region"]:
            raise ValueError(f"unexpected CSV header: {header}")
        rows = []
        for record in reader:
            if len(record) != 6:
                raise ValueError(f"malformed CSV row: {record}")
            if record[5] not in REGIONS:
                raise ValueError(f"unknown region token: {record[5]}")
            rows.append(TrajectoryRow(
                t=float(record[0]), eps=float(record[1]), mu=float(record[2]),
                delta=float(record[3]), kappa=float(record[4]),
                region=record[5],
            ))
    if not rows:
        raise ValueError("empty CSV: no data rows")
    return rows


def region_of(eps: float, mu: float, margin: float = 1e-6) -> str:
    """Region of a rate point, mirroring the classifier's closed inequalities."""
    if mu >= abs(eps) - margin:
        return "CP"
    if 2.0 * mu >= abs(eps) - eps - margin:
        return "P_not_CP"
    return "NP"


def verify_regions(rows: list[TrajectoryRow], margin: float = 1e-6) -> list[int]:
    """Indices of rows whose region token disagrees with the boundary formulas."""
    return [i for i, row in enumerate(rows)
            if region_of(row.eps, row.mu, margin) != row.region]


def _data_ranges(rows, pad_fraction):
    xs = [r.eps for r in rows]
    ys = [r.mu for r in rows]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_span = x_hi - x_lo
    y_span = y_hi - y_lo
    if x_span < 1e-9:
        x_span = max(1.0, abs(x_lo))
        x_lo, x_hi = x_lo - 0.5 * x_span, x_hi + 0.5 * x_span
        x_span = x_hi - x_lo
    if y_span < 1e-9:
        y_span = max(1.0, abs(y_lo))
        y_lo, y_hi = y_lo - 0.5 * y_span, y_hi + 0.5 * y_span
        y_span = y_hi - y_lo
    pad_x = pad_fraction * x_span
    pad_y = pad_fraction * y_span
    return (x_lo - pad_x, x_hi + pad_x), (y_lo - pad_y, y_hi + pad_y)


def _clip_halfplane(poly, keep):
    """Sutherland-Hodgman clip of a polygon against keep(pt) >= 0."""
    if not poly:
        return []
    out = []
    for i, current in enumerate(poly):
        previous = poly[i - 1]
        c_in = keep(current) >= 0
        p_in = keep(previous) >= 0
        if c_in != p_in:
            f_p, f_c = keep(previous), keep(current)
            s = f_p / (f_p - f_c)
            out.append((previous[0] + s * (current[0] - previous[0]),
                        previous[1] + s * (current[1] - previous[1])))
        if c_in:
            out.append(current)
    return out


def _region_polygons(x_range, y_range):
    """Data-space polygons of the CP wedge and the P-not-CP wedge."""
    x_lo, x_hi = x_range
    y_lo, y_hi = y_range
    rect = [(x_lo, y_lo), (x_hi, y_lo), (x_hi, y_hi), (x_lo, y_hi)]
    cp = _clip_halfplane(rect, lambda p: p[1] - p[0])
    cp = _clip_halfplane(cp, lambda p: p[1] + p[0])
    p_wedge = _clip_halfplane(rect, lambda p: p[1])
    p_wedge = _clip_halfplane(p_wedge, lambda p: p[0] - p[1])
    return cp, p_wedge


def _centroid(poly):
    if not poly:
        return None
    return (sum(p[0] for p in poly) / len(poly),
            sum(p[1] for p in poly) / len(poly))


def _nice_ticks(lo, hi, target=6):
    span = hi - lo
    raw = span / max(target, 1)
    power = math.floor(math.log10(raw)) if raw > 0 else 0
    base = raw / 10 ** power
    for mult in (1.0, 2.0, 5.0, 10.0):
        if base <= mult:
            step = mult * 10 ** power
            break
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + 1e-12 * span:
        ticks.append(0.0 if abs(value) < 1e-12 * span else value)
        value += step
    return ticks


def _fmt(v: float) -> str:
    return format(v, ".2f")


def _fmt_tick(v: float) -> str:
    return format(v, "g")


class _Canvas:
    """Affine data-to-pixel mapping inside the plot frame."""

    def __init__(self, spec, x_range, y_range):
        self.spec = spec
        self.x_lo, self.x_hi = x_range
        self.y_lo, self.y_hi = y_range
        self.plot_w = spec.width - spec.margin_left - spec.margin_right
        self.plot_h = spec.height - spec.margin_top - spec.margin_bottom

    def x(self, eps):
        frac = (eps - self.x_lo) / (self.x_hi - self.x_lo)
        return self.spec.margin_left + frac * self.plot_w

    def y(self, mu):
        frac = (mu - self.y_lo) / (self.y_hi - self.y_lo)
        return self.spec.margin_top + (1.0 - frac) * self.plot_h

    def points(self, poly):
        return " ".join(f"{_fmt(self.x(px))},{_fmt(self.y(py))}"
                        for px, py in poly)


def _path_runs(rows):
    """Consecutive same-region runs, each overlapping the next by one point."""
    runs = []
    start = 0
    for i in range(1, len(rows) + 1):
        if i == len(rows) or rows[i].region != rows[start].region:
            segment = rows[start:i]
            if start > 0:
                segment = [rows[start - 1]] + segment
            runs.append((rows[start].region, segment))
            start = i
    return runs


def _arrows(rows, canvas, count):
    """Direction markers along the path at evenly spaced row indices."""
    markers = []
    if count <= 0 or len(rows) < 2:
        return markers
    stride = max(1, len(rows) // count)
    for i in range(stride, len(rows), stride):
        x0, y0 = canvas.x(rows[i - 1].eps), canvas.y(rows[i - 1].mu)
        x1, y1 = canvas.x(rows[i].eps), canvas.y(rows[i].mu)
        dx, dy = x1 - x0, y1 - y0
        norm = math.hypot(dx, dy)
        if norm < 1e-9:
            continue
        ux, uy = dx / norm, dy / norm
        size = 5.0
        tip = (x1, y1)
        left = (x1 - size * ux + 0.5 * size * uy, y1 - size * uy - 0.5 * size * ux)
        right = (x1 - size * ux - 0.5 * size * uy, y1 - size * uy + 0.5 * size * ux)
        markers.append((tip, left, right, rows[i].region))
    return markers


def render_svg(rows: list[TrajectoryRow], spec: DiagramSpec = DiagramSpec()) -> str:
    """The diagram as an SVG string (deterministic byte-for-byte)."""
    x_range, y_range = _data_ranges(rows, spec.pad_fraction)
    canvas = _Canvas(spec, x_range, y_range)
    cp_poly, p_poly = _region_polygons(x_range, y_range)

    frame_x = spec.margin_left
    frame_y = spec.margin_top
    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" '
        f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">'
    )
    out.append("<defs>")
    out.append(
        '<pattern id="hatch-cp" width="8" height="8" patternUnits="userSpaceOnUse">'
        '<rect width="8" height="8" fill="#eef6ee"/>'
        '<path d="M0,8 L8,0" stroke="#9dbf9d" stroke-width="1"/>'
        '<path d="M0,0 L8,8" stroke="#9dbf9d" stroke-width="1"/>'
        "</pattern>"
    )
    out.append(
        '<pattern id="stripe-p" width="8" height="8" patternUnits="userSpaceOnUse">'
        '<rect width="8" height="8" fill="#fdf3e3"/>'
        '<path d="M0,8 L8,0" stroke="#d9a86a" stroke-width="1.5"/>'
        "</pattern>"
    )
    out.append(
        f'<clipPath id="plot-area"><rect x="{frame_x}" y="{frame_y}" '
        f'width="{canvas.plot_w}" height="{canvas.plot_h}"/></clipPath>'
    )
    out.append("</defs>")
    out.append(
        f'<rect x="0" y="0" width="{spec.width}" height="{spec.height}" fill="#ffffff"/>'
    )

    # Regions, painted back to front: white (NP) base, P wedge, CP wedge.
    out.append('<g clip-path="url(#plot-area)">')
    out.append(
        f'<rect x="{frame_x}" y="{frame_y}" width="{canvas.plot_w}" '
        f'height="{canvas.plot_h}" fill="#ffffff"/>'
    )
    if p_poly:
        out.append(f'<polygon points="{canvas.points(p_poly)}" fill="url(#stripe-p)"/>')
    if cp_poly:
        out.append(f'<polygon points="{canvas.points(cp_poly)}" fill="url(#hatch-cp)"/>')

    # Region boundaries: mu = |eps| and the positive half-line mu = 0.
    x_lo, x_hi = x_range
    y_hi = y_range[1]
    boundary = []
    if x_lo < 0:
        boundary.append(((x_lo, -x_lo), (0.0, 0.0), "cp"))
    if x_hi > 0:
        boundary.append(((max(x_lo, 0.0), max(x_lo, 0.0)), (x_hi, x_hi), "cp"))
        boundary.append(((max(x_lo, 0.0), 0.0), (x_hi, 0.0), "p"))
    for (ax, ay), (bx, by), kind in boundary:
        dash = "" if kind == "cp" else ' stroke-dasharray="6,4"'
        out.append(
            f'<line x1="{_fmt(canvas.x(ax))}" y1="{_fmt(canvas.y(ay))}" '
            f'x2="{_fmt(canvas.x(bx))}" y2="{_fmt(canvas.y(by))}" '
            f'stroke="#555555" stroke-width="1.2"{dash}/>'
        )

    # Trajectory: one polyline per same-region run, plus direction arrows.
    single_point = (
        max(r.eps for r in rows) - min(r.eps for r in rows) < 1e-12
        and max(r.mu for r in rows) - min(r.mu for r in rows) < 1e-12
    )
    if single_point:
        row = rows[0]
        out.append(
            f'<circle cx="{_fmt(canvas.x(row.eps))}" cy="{_fmt(canvas.y(row.mu))}" '
            f'r="5" fill="{PATH_COLORS[row.region]}" stroke="#222222" '
            'stroke-width="1"/>'
        )
    else:
        for region, segment in _path_runs(rows):
            pts = canvas.points([(r.eps, r.mu) for r in segment])
            out.append(
                f'<polyline points="{pts}" fill="none" '
                f'stroke="{PATH_COLORS[region]}" stroke-width="2"/>'
            )
        for tip, left, right, region in _arrows(rows, canvas, spec.arrow_count):
            pts = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in (tip, left, right))
            out.append(f'<polygon points="{pts}" fill="{PATH_COLORS[region]}"/>')
    out.append("</g>")

    # Frame and axes.
    out.append(
        f'<rect x="{frame_x}" y="{frame_y}" width="{canvas.plot_w}" '
        f'height="{canvas.plot_h}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    y_axis_base = frame_y + canvas.plot_h
    for tick in _nice_ticks(*x_range):
        px = canvas.x(tick)
        out.append(
            f'<line x1="{_fmt(px)}" y1="{y_axis_base}" x2="{_fmt(px)}" '
            f'y2="{y_axis_base + 5}" stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(px)}" y="{y_axis_base + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle" fill="#333333">{_fmt_tick(tick)}</text>'
        )
    for tick in _nice_ticks(*y_range):
        py = canvas.y(tick)
        out.append(
            f'<line x1="{frame_x - 5}" y1="{_fmt(py)}" x2="{frame_x}" '
            f'y2="{_fmt(py)}" stroke="#333333" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{frame_x - 8}" y="{_fmt(py + 3.5)}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end" fill="#333333">{_fmt_tick(tick)}</text>'
        )
    out.append(
        f'<text x="{frame_x + canvas.plot_w / 2:.1f}" y="{spec.height - 10}" '
        'font-family="sans-serif" font-size="13" text-anchor="middle" '
        'fill="#333333">eps (gain rate)</text>'
    )
    out.append(
        f'<text x="16" y="{frame_y + canvas.plot_h / 2:.1f}" '
        'font-family="sans-serif" font-size="13" text-anchor="middle" '
        f'fill="#333333" transform="rotate(-90 16 {frame_y + canvas.plot_h / 2:.1f})"'
        ">mu (noise rate)</text>"
    )

    # Region labels at wedge centroids (skipped when the wedge is off-view).
    for poly, label in ((cp_poly, "CP"), (p_poly, "P\\CP")):
        center = _centroid(poly)
        if center is None:
            continue
        out.append(
            f'<text x="{_fmt(canvas.x(center[0]))}" y="{_fmt(canvas.y(center[1]))}" '
            'font-family="sans-serif" font-size="14" text-anchor="middle" '
            f'fill="#444444">{label}</text>'
        )
    np_probe = (x_range[0] + 0.12 * (x_range[1] - x_range[0]),
                y_range[0] + 0.10 * (y_range[1] - y_range[0]))
    if region_of(*np_probe, margin=0.0) == "NP":
        out.append(
            f'<text x="{_fmt(canvas.x(np_probe[0]))}" y="{_fmt(canvas.y(np_probe[1]))}" '
            'font-family="sans-serif" font-size="14" text-anchor="middle" '
            'fill="#444444">NP</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_png(rows: list[TrajectoryRow], out_path: str,
               spec: DiagramSpec = DiagramSpec()) -> None:
    """Convenience raster output; the SVG is the canonical format."""
    from PIL import Image, ImageDraw

    x_range, y_range = _data_ranges(rows, spec.pad_fraction)
    canvas = _Canvas(spec, x_range, y_range)
    cp_poly, p_poly = _region_polygons(x_range, y_range)
    image = Image.new("RGB", (spec.width, spec.height), "#ffffff")
    draw = ImageDraw.Draw(image)

    def to_px(poly):
        return [(canvas.x(px), canvas.y(py)) for px, py in poly]

    if p_poly:
        draw.polygon(to_px(p_poly), fill="#fdf3e3")
    if cp_poly:
        draw.polygon(to_px(cp_poly), fill="#eef6ee")
    frame = [(spec.margin_left, spec.margin_top),
             (spec.margin_left + canvas.plot_w, spec.margin_top + canvas.plot_h)]
    draw.rectangle(frame, outline="#333333")
    pts = [(canvas.x(r.eps), canvas.y(r.mu)) for r in rows]
    if len(set(pts)) == 1:
        x0, y0 = pts[0]
        draw.ellipse([x0 - 4, y0 - 4, x0 + 4, y0 + 4],
                     fill=PATH_COLORS[rows[0].region])
    else:
        for i in range(1, len(pts)):
            draw.line([pts[i - 1], pts[i]], fill=PATH_COLORS[rows[i].region],
                      width=2)
    image.save(out_path, format="PNG")


def render(csv_path: str, out_path: str,
           spec: DiagramSpec = DiagramSpec()) -> None:
    """Render a trajectory CSV to an SVG (or PNG) file."""
    rows = read_trajectory(csv_path)
    if spec.png:
        render_png(rows, out_path, spec)
        return
    svg = render_svg(rows, spec)
    with open(out_path, "w", newline="\n") as fh:
        fh.write(svg)
