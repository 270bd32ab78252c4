"""Minimal deterministic SVG polyline charts; no plotting framework.

Renders signed authorship curves: one polyline per feature mode
(solid / dashed / dotted), a zero axis, and labeled vertical boundary
markers. Output is plain SVG text with fixed coordinate formatting so
identical inputs give identical bytes.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .rolling import RollingResult

_DASHES = {"combined": None, "rhythm": "6,4", "words": "2,3"}
_FALLBACK_DASHES = [None, "6,4", "2,3", "9,3,2,3"]


def _coord(value: float) -> str:
    return format(value, ".2f")


def _polyline(points: Sequence[tuple[float, float]], dash: str | None, width: float) -> str:
    attrs = f'fill="none" stroke="black" stroke-width="{_coord(width)}"'
    if dash:
        attrs += f' stroke-dasharray="{dash}"'
    coords = " ".join(f"{_coord(x)},{_coord(y)}" for x, y in points)
    return f'<polyline {attrs} points="{coords}"/>'


def _text(x: float, y: float, content: str, size: int = 10, anchor: str = "middle") -> str:
    content = content.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    return (
        f'<text x="{_coord(x)}" y="{_coord(y)}" font-size="{size}" '
        f'font-family="sans-serif" text-anchor="{anchor}">{content}</text>'
    )


def curve_chart(
    curves: Mapping[str, RollingResult],
    boundaries: Sequence[tuple[int, str]] = (),
    width: int = 960,
    height: int = 340,
) -> str:
    """SVG of the average signed curve per feature mode.

    x covers the target play's line range, y covers [-1, 1]; curves are keyed
    by mode name and drawn solid (combined), dashed (rhythm) or dotted (words).
    """
    if not curves:
        raise ValueError("no curves to render")
    first = next(iter(curves.values()))
    margin_left, margin_right, margin_top, margin_bottom = 48, 16, 28, 32
    plot_w = width - margin_left - margin_right
    plot_h = height - margin_top - margin_bottom

    n_lines = max(g.line_span[1] for r in curves.values() for g in r.groups)

    def x_pos(line: float) -> float:
        return margin_left + (line - 1) / max(n_lines - 1, 1) * plot_w

    def y_pos(value: float) -> float:
        return margin_top + (1.0 - value) / 2.0 * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{margin_left}" y="{margin_top}" width="{plot_w}" height="{plot_h}" '
        'fill="white" stroke="black" stroke-width="1"/>',
        # zero axis
        f'<line x1="{_coord(x_pos(1))}" y1="{_coord(y_pos(0))}" '
        f'x2="{_coord(x_pos(n_lines))}" y2="{_coord(y_pos(0))}" '
        'stroke="gray" stroke-width="0.5"/>',
    ]
    for value in (-1.0, -0.5, 0.0, 0.5, 1.0):
        parts.append(_text(margin_left - 6, y_pos(value) + 3, format(value, ".1f"), anchor="end"))
    step = max(1, n_lines // 8)
    for line in range(1, n_lines + 1, step):
        parts.append(_text(x_pos(line), height - margin_bottom + 14, str(line)))
    parts.append(_text(width / 2, height - 6, "line number", size=11))

    for index, (line, label) in enumerate(boundaries):
        x = x_pos(line)
        parts.append(
            f'<line x1="{_coord(x)}" y1="{margin_top}" x2="{_coord(x)}" '
            f'y2="{margin_top + plot_h}" stroke="gray" stroke-width="0.6"/>'
        )
        parts.append(_text(x, margin_top - 6 - 10 * (index % 2), label, size=9))

    legend_y = margin_top + 14
    for mode_index, (mode, result) in enumerate(sorted(curves.items())):
        dash = _DASHES.get(mode, _FALLBACK_DASHES[mode_index % len(_FALLBACK_DASHES)])
        points = [
            (x_pos((g.line_span[0] + g.line_span[1]) / 2.0), y_pos(avg))
            for g, (_, _, avg) in zip(result.groups, result.signed_curve())
        ]
        parts.append(_polyline(points, dash, 1.4))
        sample_x = margin_left + 8
        sample_y = legend_y + 14 * mode_index
        parts.append(_polyline([(sample_x, sample_y), (sample_x + 26, sample_y)], dash, 1.4))
        parts.append(_text(sample_x + 32, sample_y + 3, mode, size=9, anchor="start"))

    positive = first.positive_author
    negative = first.negative_author if len(first.authors) == 2 else ""
    parts.append(_text(margin_left + plot_w - 4, margin_top + 12, f"+ {positive}", size=10, anchor="end"))
    if negative:
        parts.append(
            _text(margin_left + plot_w - 4, margin_top + plot_h - 6, f"- {negative}", size=10, anchor="end")
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
