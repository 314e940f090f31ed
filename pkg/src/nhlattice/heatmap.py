"""SVG space-time heatmaps of the normalized amplitude profile.

Renders |rho_n(t)| as a site-vs-time grid of colored cells.  The color
map is the fixed 256-entry lookup table COLOR_TABLE, interpolated from
the anchor ramp below; its luminance rises monotonically from dark to
bright, so cell brightness is a monotone function of the profile value.
Output is a plain string of SVG, byte-deterministic for identical input.
"""

from __future__ import annotations

import numpy as np

from .dynamics import Trajectory, normalized_profile_matrix

__all__ = ["COLOR_TABLE", "COLOR_ANCHORS", "luminance", "render_heatmap"]

# Dark-to-bright ramp anchors (R, G, B); luminance increases along the list.
COLOR_ANCHORS = (
    (0, 0, 4),
    (45, 17, 90),
    (114, 31, 129),
    (183, 55, 121),
    (241, 96, 93),
    (253, 163, 74),
    (252, 227, 110),
    (252, 255, 220),
)


def _build_table() -> tuple:
    anchors = np.asarray(COLOR_ANCHORS, dtype=float)
    pos = np.linspace(0.0, 1.0, len(anchors))
    xs = np.linspace(0.0, 1.0, 256)
    table = []
    for x in xs:
        rgb = [np.interp(x, pos, anchors[:, c]) for c in range(3)]
        table.append(tuple(int(round(v)) for v in rgb))
    return tuple(table)


COLOR_TABLE = _build_table()


def luminance(rgb) -> float:
    """Rec. 709 relative luminance of an (R, G, B) triple in 0..255."""
    r, g, b = rgb
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


_CELL = 3  # pixels per (site, sample) cell
_MARGIN_LEFT = 46
_MARGIN_BOTTOM = 30
_MARGIN_TOP = 12
_BAR_WIDTH = 14
_BAR_GAP = 16
_MARGIN_RIGHT = _BAR_GAP + _BAR_WIDTH + 42


def _hex(rgb) -> str:
    return "#%02x%02x%02x" % rgb


def _fmt(x: float) -> str:
    return "%.6g" % x


def render_heatmap(traj: Trajectory, title: str = "") -> str:
    """Render the trajectory's profile as an SVG document string."""
    if traj.n_samples < 1 or len(traj.site_labels) < 1:
        raise ValueError("cannot render an empty trajectory")
    rho = normalized_profile_matrix(traj)  # (n_samples, n_sites)
    vmax = float(np.max(rho))
    if vmax <= 0.0:
        raise ValueError("profile is identically zero")
    idx = np.rint(rho / vmax * 255.0).astype(int)

    n_t, n_x = rho.shape
    grid_w = n_t * _CELL
    grid_h = n_x * _CELL
    width = _MARGIN_LEFT + grid_w + _MARGIN_RIGHT
    height = _MARGIN_TOP + grid_h + _MARGIN_BOTTOM
    x0, y0 = _MARGIN_LEFT, _MARGIN_TOP
    labels = traj.site_labels
    n_max = int(labels[-1])

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>')
    if title:
        out.append(
            f'<text x="{x0}" y="{_MARGIN_TOP - 2}" font-family="monospace" '
            f'font-size="10" fill="#000000">{title}</text>'
        )
    # background = color of zero, individual cells drawn only above it
    out.append(
        f'<rect x="{x0}" y="{y0}" width="{grid_w}" height="{grid_h}" '
        f'fill="{_hex(COLOR_TABLE[0])}"/>'
    )
    for k in range(n_t):
        col_x = x0 + k * _CELL
        for i in range(n_x):
            level = idx[k, i]
            if level == 0:
                continue
            cy = y0 + (n_max - int(labels[i])) * _CELL
            out.append(
                f'<rect x="{col_x}" y="{cy}" width="{_CELL}" height="{_CELL}" '
                f'fill="{_hex(COLOR_TABLE[level])}"/>'
            )

    # axes
    axis_y = y0 + grid_h
    out.append(
        f'<line x1="{x0}" y1="{axis_y}" x2="{x0 + grid_w}" y2="{axis_y}" '
        f'stroke="#000000" stroke-width="1"/>'
    )
    out.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{axis_y}" '
        f'stroke="#000000" stroke-width="1"/>'
    )
    for frac in (0.0, 0.5, 1.0):
        t_val = traj.times[0] + frac * (traj.times[-1] - traj.times[0])
        tx = x0 + frac * grid_w
        out.append(
            f'<line x1="{_fmt(tx)}" y1="{axis_y}" x2="{_fmt(tx)}" y2="{axis_y + 4}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(tx)}" y="{axis_y + 14}" font-family="monospace" font-size="9" '
            f'text-anchor="middle" fill="#000000">{_fmt(t_val)}</text>'
        )
        n_val = labels[0] + frac * (labels[-1] - labels[0])
        ty = axis_y - frac * grid_h
        out.append(
            f'<text x="{x0 - 4}" y="{_fmt(ty + 3)}" font-family="monospace" font-size="9" '
            f'text-anchor="end" fill="#000000">{_fmt(n_val)}</text>'
        )
    out.append(
        f'<text x="{x0 + grid_w // 2}" y="{axis_y + 26}" font-family="monospace" '
        f'font-size="10" text-anchor="middle" fill="#000000">time t (1/kappa)</text>'
    )
    out.append(
        f'<text x="12" y="{y0 + grid_h // 2}" font-family="monospace" font-size="10" '
        f'text-anchor="middle" fill="#000000" '
        f'transform="rotate(-90 12 {y0 + grid_h // 2})">site n</text>'
    )

    # color scale: vertical bar, bright (vmax) on top
    bar_x = x0 + grid_w + _BAR_GAP
    steps = 32
    step_h = grid_h / steps
    for s in range(steps):
        level = int(round((steps - 1 - s) / (steps - 1) * 255))
        out.append(
            f'<rect x="{bar_x}" y="{_fmt(y0 + s * step_h)}" width="{_BAR_WIDTH}" '
            f'height="{_fmt(step_h + 0.5)}" fill="{_hex(COLOR_TABLE[level])}"/>'
        )
    out.append(
        f'<text x="{bar_x + _BAR_WIDTH + 4}" y="{y0 + 8}" font-family="monospace" '
        f'font-size="9" fill="#000000">{_fmt(vmax)}</text>'
    )
    out.append(
        f'<text x="{bar_x + _BAR_WIDTH + 4}" y="{y0 + grid_h}" font-family="monospace" '
        f'font-size="9" fill="#000000">0</text>'
    )
    out.append(
        f'<text x="{bar_x + _BAR_WIDTH + 4}" y="{y0 + grid_h // 2}" font-family="monospace" '
        f'font-size="9" fill="#000000">rho</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
