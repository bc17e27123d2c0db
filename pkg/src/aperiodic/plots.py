"""Minimal deterministic SVG emitters (no plotting dependency, stable bytes)."""

from __future__ import annotations

W, H = 640, 360
PAD = 48


def _fmt(v) -> str:
    return f"{v:.6g}"


def _svg(body: list, title: str) -> str:
    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W // 2}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="13">{title}</text>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def _x_scale(vals):
    lo = min(vals) if vals else 0.0
    hi = max(vals) if vals else 1.0
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo

    def to_px(v):
        return PAD + (v - lo) / span * (W - 2 * PAD)

    return to_px, lo, hi


def stem_plot(points, path, title="diffraction"):
    """points: iterable of (k_norm, intensity, is_control)."""
    pts = sorted(points)
    to_px, _, _ = _x_scale([p[0] for p in pts])
    max_i = max((p[1] for p in pts), default=1.0) or 1.0
    body = [f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD}" y2="{H - PAD}" '
            f'stroke="black"/>']
    for k, inten, ctrl in pts:
        x = _fmt(to_px(k))
        y = _fmt(H - PAD - (inten / max_i) * (H - 2 * PAD - 20))
        color = "#d62728" if ctrl else "#1f77b4"
        body.append(f'<line x1="{x}" y1="{H - PAD}" x2="{x}" y2="{y}" '
                    f'stroke="{color}" stroke-width="1.5"/>')
        body.append(f'<circle cx="{x}" cy="{y}" r="2" fill="{color}"/>')
    with open(path, "w") as fh:
        fh.write(_svg(body, title))


def interval_overlay(estimate, truth, path, title="window reconstruction"):
    """Two interval unions drawn as horizontal bars (truth above, estimate below)."""
    vals = [c.lo for c in estimate.components] + [c.hi for c in estimate.components]
    if truth is not None:
        vals += [c.lo for c in truth.components] + [c.hi for c in truth.components]
    to_px, _, _ = _x_scale(vals)
    body = []
    rows = [("estimate", estimate, "#1f77b4", H // 2 + 30)]
    if truth is not None:
        rows.append(("truth", truth, "#2ca02c", H // 2 - 40))
    for label, union, color, y in rows:
        for c in union.components:
            x0, x1 = _fmt(to_px(c.lo)), _fmt(to_px(c.hi))
            body.append(f'<rect x="{x0}" y="{y}" '
                        f'width="{_fmt(to_px(c.hi) - to_px(c.lo))}" height="24" '
                        f'fill="{color}" fill-opacity="0.6"/>')
        body.append(f'<text x="{PAD}" y="{y - 6}" font-family="monospace" '
                    f'font-size="12">{label}</text>')
    with open(path, "w") as fh:
        fh.write(_svg(body, title))


def gap_chart(members, d_values, scan_radius, path, title="almost periods"):
    """Members on a line with their pseudo-metric values as stem heights."""
    to_px, _, _ = _x_scale([-scan_radius, scan_radius])
    max_d = max(d_values, default=1.0) or 1.0
    body = [f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD}" y2="{H - PAD}" '
            f'stroke="black"/>']
    for t, d in zip(members, d_values):
        x = _fmt(to_px(float(t)))
        y = _fmt(H - PAD - (d / max_d) * (H - 2 * PAD - 20))
        body.append(f'<line x1="{x}" y1="{H - PAD}" x2="{x}" y2="{y}" '
                    f'stroke="#1f77b4"/>')
    with open(path, "w") as fh:
        fh.write(_svg(body, title))
