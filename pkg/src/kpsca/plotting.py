"""Dependency-free scatter output: CSV of per-slot scores plus an SVG plot.

Both emitters are pure functions of their inputs with fixed float formatting,
so repeated runs produce byte-identical files.
"""

import numpy as np

_COLORS = ("#1f77b4", "#d62728")
_W, _H, _MARGIN = 640, 480, 54


def _two_columns(scores: np.ndarray) -> np.ndarray:
    scores = np.atleast_2d(np.asarray(scores, dtype=np.float64))
    out = np.zeros((scores.shape[0], 2))
    out[:, : min(2, scores.shape[1])] = scores[:, :2]
    return out


def _fmt(v: float) -> str:
    return format(float(v), ".6g")


def scatter_csv(scores, labels, truth_bits=None) -> str:
    """CSV rows (slot, pc1, pc2, label[, truth_bit])."""
    pts = _two_columns(scores)
    labels = np.asarray(labels)
    lines = ["slot,pc1,pc2,label" + (",truth_bit" if truth_bits is not None else "")]
    for t in range(pts.shape[0]):
        row = f"{t},{_fmt(pts[t, 0])},{_fmt(pts[t, 1])},{int(labels[t])}"
        if truth_bits is not None:
            row += f",{int(truth_bits[t])}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def _axis_ticks(lo: float, hi: float) -> list[float]:
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    return [lo, (lo + hi) / 2.0, hi]


def scatter_svg(scores, labels, title: str) -> str:
    """Scatter of the first two score columns, colored by predicted label."""
    pts = _two_columns(scores)
    labels = np.asarray(labels)
    x, y = pts[:, 0], pts[:, 1]
    xlo, xhi = float(x.min()), float(x.max())
    ylo, yhi = float(y.min()), float(y.max())
    if xlo == xhi:
        xlo, xhi = xlo - 1.0, xhi + 1.0
    if ylo == yhi:
        ylo, yhi = ylo - 1.0, yhi + 1.0
    xpad, ypad = 0.05 * (xhi - xlo), 0.05 * (yhi - ylo)
    xlo, xhi = xlo - xpad, xhi + xpad
    ylo, yhi = ylo - ypad, yhi + ypad

    def sx(v):
        return _MARGIN + (v - xlo) / (xhi - xlo) * (_W - 2 * _MARGIN)

    def sy(v):
        return _H - _MARGIN - (v - ylo) / (yhi - ylo) * (_H - 2 * _MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{_MARGIN}" y1="{_H - _MARGIN}" x2="{_W - _MARGIN}" '
        f'y2="{_H - _MARGIN}" stroke="black"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_H - _MARGIN}" stroke="black"/>',
        f'<text x="{_W // 2}" y="{_H - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">PC1</text>',
        f'<text x="16" y="{_H // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {_H // 2})">PC2</text>',
    ]
    for v in _axis_ticks(xlo, xhi):
        parts.append(
            f'<text x="{_fmt(sx(v))}" y="{_H - _MARGIN + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{_fmt(v)}</text>'
        )
    for v in _axis_ticks(ylo, yhi):
        parts.append(
            f'<text x="{_MARGIN - 6}" y="{_fmt(sy(v))}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_fmt(v)}</text>'
        )
    for t in range(pts.shape[0]):
        parts.append(
            f'<circle cx="{_fmt(sx(x[t]))}" cy="{_fmt(sy(y[t]))}" r="3" '
            f'fill="{_COLORS[int(labels[t]) % 2]}" fill-opacity="0.75"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
