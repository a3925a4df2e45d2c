"""Static SVG maps of train / test / omitted roles per fold."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .plan import ResamplingPlan
from .task import Task

DEFAULT_COLORS = {"test": "#d95f02", "train": "#1b9e77", "omitted": "#9e9e9e"}
PANEL = 320
MARGIN = 24


@dataclass
class PlotSpec:
    fold_ids: Sequence[int] = (1,)
    repeat: int = 1
    point_size: float = 2.5
    colors: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_COLORS))
    show_blocks: bool = False
    facet_by_time: bool = False


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _roles(plan: ResamplingPlan, fold_id: int, repeat: int, n: int) -> np.ndarray:
    f = plan.fold(fold_id, repeat)
    role = np.full(n, "", dtype=object)
    role[f.train] = "train"
    role[f.omitted] = "omitted"
    role[f.test] = "test"
    return role


def render_partition_svg(task: Task, plan: ResamplingPlan, spec: Optional[PlotSpec] = None, out=None) -> str:
    """Render the requested folds as small multiples in one SVG document.

    Returns the SVG text and writes it to ``out`` when given. Axes share one
    scale so the map keeps a 1:1 aspect ratio.
    """
    spec = spec or PlotSpec()
    for fid in spec.fold_ids:
        plan.fold(fid, spec.repeat)
    if spec.facet_by_time and task.time is None:
        raise ValueError("facet_by_time needs a task with a time role")

    xy = task.coords
    lo = xy.min(axis=0)
    span = float(max(np.ptp(xy[:, 0]), np.ptp(xy[:, 1]), 1e-12))
    rects = {}
    if spec.show_blocks and plan.blocks is not None and plan.blocks.geometry:
        rects = plan.blocks.geometry
        corners = np.array([c for r in rects.values() for c in r])
        lo = np.minimum(lo, corners.min(axis=0))
        hi = np.maximum(xy.max(axis=0), corners.max(axis=0))
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    scale = (PANEL - 2 * MARGIN) / span

    def px(x, y):
        return MARGIN + (x - lo[0]) * scale, PANEL - MARGIN - (y - lo[1]) * scale

    panels = []
    times = np.unique(task.time) if spec.facet_by_time else [None]
    for fid in spec.fold_ids:
        role = _roles(plan, fid, spec.repeat, task.n)
        for t in times:
            mask = np.ones(task.n, dtype=bool) if t is None else task.time == t
            title = f"Fold {fid}" + ("" if t is None else f", time {t}")
            panels.append((title, role, mask))

    present = set()
    for _, role, mask in panels:
        present |= set(role[mask].tolist())
    legend = [r for r in ("test", "train", "omitted") if r in present]

    ncol = min(len(panels), 4)
    nrow = -(-len(panels) // ncol)
    width, height = ncol * PANEL, nrow * PANEL + 28
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    for i, (title, role, mask) in enumerate(panels):
        ox, oy = (i % ncol) * PANEL, (i // ncol) * PANEL
        parts.append(f'<g class="panel" transform="translate({ox},{oy})">')
        parts.append(f'<text x="{MARGIN}" y="16" font-family="sans-serif" font-size="12">{escape(title)}</text>')
        for label in sorted(rects):
            (x0, y0), (x1, y1) = rects[label]
            ax, ay = px(x0, y1)
            bx, by = px(x1, y0)
            parts.append(
                f'<rect class="block" x="{_fmt(ax)}" y="{_fmt(ay)}" width="{_fmt(bx - ax)}" '
                f'height="{_fmt(by - ay)}" fill="none" stroke="#555555" stroke-width="0.6"/>'
            )
        # test points drawn last so they stay visible
        for r in ("omitted", "train", "test"):
            for j in np.flatnonzero(mask & (role == r)):
                cx, cy = px(*xy[j])
                parts.append(
                    f'<circle class="{r}" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{spec.point_size}" '
                    f'fill="{spec.colors[r]}"/>'
                )
        parts.append("</g>")
    ly = nrow * PANEL + 18
    for i, r in enumerate(legend):
        lx = MARGIN + i * 90
        parts.append(f'<g class="legend-entry"><circle cx="{lx}" cy="{ly - 4}" r="5" fill="{spec.colors[r]}"/>')
        parts.append(f'<text x="{lx + 9}" y="{ly}" font-family="sans-serif" font-size="12">{r}</text></g>')
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if out is not None:
        Path(out).write_text(text, encoding="utf-8")
    return text
