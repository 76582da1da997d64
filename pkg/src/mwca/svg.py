"""Minimal deterministic SVG scatter plots for point clouds."""

from xml.sax.saxutils import escape, quoteattr

GLYPHS = ("circle", "square", "triangle", "diamond", "triangle-down", "cross")
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

SIZE = 640
MARGIN = 48
PADDING = 0.05
R = 4.5


def _n(v):
    # fixed precision keeps the output byte-stable across platforms
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def _glyph(kind, x, y, color):
    fill = f'fill="{color}"'
    if kind == "circle":
        return f'<circle cx="{_n(x)}" cy="{_n(y)}" r="{_n(R)}" {fill}/>'
    if kind == "square":
        s = R * 1.8
        return (f'<rect x="{_n(x - s / 2)}" y="{_n(y - s / 2)}" width="{_n(s)}" '
                f'height="{_n(s)}" {fill}/>')
    if kind == "cross":
        return (f'<path d="M{_n(x - R)},{_n(y - R)}L{_n(x + R)},{_n(y + R)}'
                f'M{_n(x - R)},{_n(y + R)}L{_n(x + R)},{_n(y - R)}" '
                f'stroke="{color}" stroke-width="2" fill="none"/>')
    if kind == "triangle":
        pts = [(x, y - R * 1.2), (x + R * 1.1, y + R * 0.8), (x - R * 1.1, y + R * 0.8)]
    elif kind == "triangle-down":
        pts = [(x, y + R * 1.2), (x + R * 1.1, y - R * 0.8), (x - R * 1.1, y - R * 0.8)]
    else:
        pts = [(x, y - R * 1.3), (x + R * 1.3, y), (x, y + R * 1.3), (x - R * 1.3, y)]
    coords = " ".join(f"{_n(px)},{_n(py)}" for px, py in pts)
    return f'<polygon points="{coords}" {fill}/>'


def biplot(clouds, axis_labels=("", ""), title=None):
    """Overlay several labeled 2-D point clouds in one SVG document.

    ``clouds`` is a sequence of ``(name, labels, points)`` where ``points``
    is an ``n x 2`` array. Axes share one scale, are symmetric about the
    origin and padded by 5 %.
    """
    extent = 0.0
    for _, _, pts in clouds:
        for x, y in pts:
            extent = max(extent, abs(float(x)), abs(float(y)))
    extent = (extent or 1.0) * (1.0 + PADDING)
    half = (SIZE - 2 * MARGIN) / 2.0
    cx = cy = SIZE / 2.0

    def to_px(x, y):
        return cx + float(x) / extent * half, cy - float(y) / extent * half

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_n(cx)}" y="20" text-anchor="middle" font-size="14">'
                   f"{escape(title)}</text>")
    lo, hi = MARGIN, SIZE - MARGIN
    out.append(f'<g stroke="#999" stroke-width="1">'
               f'<line x1="{lo}" y1="{_n(cy)}" x2="{hi}" y2="{_n(cy)}"/>'
               f'<line x1="{_n(cx)}" y1="{lo}" x2="{_n(cx)}" y2="{hi}"/></g>')
    out.append(f'<text x="{hi}" y="{_n(cy - 6)}" text-anchor="end">{escape(axis_labels[0])}</text>')
    out.append(f'<text x="{_n(cx + 6)}" y="{lo + 10}">{escape(axis_labels[1])}</text>')

    for k, (name, labels, pts) in enumerate(clouds):
        glyph = GLYPHS[k % len(GLYPHS)]
        color = COLORS[k % len(COLORS)]
        out.append(f'<g class="cloud" data-mode={quoteattr(str(name))}>')
        for lab, (x, y) in zip(labels, pts):
            px, py = to_px(x, y)
            out.append(_glyph(glyph, px, py, color))
            out.append(f'<text x="{_n(px + 7)}" y="{_n(py - 5)}" fill="{color}">'
                       f"{escape(str(lab))}</text>")
        out.append("</g>")
        ly = SIZE - MARGIN + 18
        lx = MARGIN + 110 * k
        out.append(_glyph(glyph, lx, ly, color))
        out.append(f'<text x="{lx + 9}" y="{ly + 4}">{escape(str(name))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
