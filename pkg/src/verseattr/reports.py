"""Deterministic CSV outputs for vote tables, accuracies, curves, features.

All floats are written with 9 significant digits and rows are ordered by
sorted keys, so re-running with the same inputs reproduces files byte for
byte and diff-based testing stays viable.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Mapping, Sequence

from .crossval import VoteTable
from .features import FeatureSpec, Segment, vectorize_segments
from .rolling import RollingResult


def fmt(value: float) -> str:
    return format(float(value), ".9g")


def _render(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def votes_csv(table: VoteTable) -> str:
    header = ["play_id", "act", "scene", *table.authors, "truth"]
    rows = []
    for key in sorted(table.rows):
        play_id, act, scene = key
        counts = table.rows[key]
        truth = table.truth.get(key) or ""
        rows.append([play_id, act, scene, *(counts[a] for a in table.authors), truth])
    return _render(header, rows)


def accuracy_csv(tables: Sequence[VoteTable]) -> str:
    """Play-by-mode accuracy matrix merged from one vote table per mode."""
    modes = [t.mode for t in tables]
    if len(set(modes)) != len(modes):
        raise ValueError(f"duplicate modes in accuracy tables: {modes}")
    plays = sorted({play for t in tables for play in t.play_accuracy})
    header = ["play_id", *modes]
    rows = [
        [play, *(fmt(t.play_accuracy[play]) if play in t.play_accuracy else "" for t in tables)]
        for play in plays
    ]
    return _render(header, rows)


def curve_csv(result: RollingResult) -> str:
    header = ["group_index", "first_line", "last_line", "p_author1", "p_author2_negated", "average"]
    rows = []
    for group, (p_pos, neg, avg) in zip(result.groups, result.signed_curve()):
        rows.append(
            [group.group_index, group.line_span[0], group.line_span[1], fmt(p_pos), fmt(neg), fmt(avg)]
        )
    return _render(header, rows)


def feature_matrix_csv(
    segments: Sequence[Segment], spec: FeatureSpec, labels: bool = True
) -> str:
    header = ["play_id", "ref", "author", *spec.feature_names]
    X = vectorize_segments(segments, spec)
    rows = []
    for seg, row in zip(segments, X):
        ref = f"{seg.ref[0]}:{seg.ref[1]}.{seg.ref[2]}"
        rows.append([seg.play_id, ref, seg.label or "", *(fmt(v) for v in row)])
    return _render(header, rows)


def write_text(path: str | Path, content: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")
    return path


def read_boundaries(path: str | Path) -> list[tuple[int, str]]:
    """Boundary file: TSV line_index<TAB>label, '#' comments allowed."""
    out: list[tuple[int, str]] = []
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{line_no}: expected line_index<TAB>label")
        try:
            index = int(parts[0])
        except ValueError:
            raise ValueError(f"{path}:{line_no}: line_index must be an integer") from None
        out.append((index, parts[1]))
    return sorted(out)
