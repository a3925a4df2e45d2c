"""Geometric partitioning on rectangular grids: leave-one-tile-out and
CV at the block level.

Grid cells are numbered row-major from the top-left (max-y row first). A
point belongs to the half-open cell ``[lo, hi)`` on each axis, except that
the last row/column is closed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ..plan import BlockSet, Fold
from ..task import Task
from ._base import PartitionError, assemble, deal, make_rng

SELECTIONS = ("random", "systematic", "checkerboard")


@dataclass(frozen=True)
class TileSpec:
    nsplit: Optional[tuple[int, int]] = None
    dsplit: Optional[tuple[float, float]] = None
    rotation: float = 0.0
    min_n: Optional[int] = None
    min_frac: Optional[float] = None

    def __post_init__(self):
        if (self.nsplit is None) == (self.dsplit is None):
            raise PartitionError("give exactly one of nsplit or dsplit")
        if self.nsplit is not None:
            if len(self.nsplit) != 2 or min(self.nsplit) < 1:
                raise PartitionError("nsplit must be two positive counts (rows, cols)")
        if self.dsplit is not None:
            if len(self.dsplit) != 2 or not min(self.dsplit) > 0:
                raise PartitionError("dsplit must be two positive side lengths (dx, dy)")
        if self.min_n is not None and self.min_frac is not None:
            raise PartitionError("give at most one of min_n or min_frac")
        if self.min_frac is not None and not 0 <= self.min_frac <= 1:
            raise PartitionError("min_frac must lie in [0, 1]")
        if not -90 <= self.rotation < 90:
            raise PartitionError("rotation must lie in [-90, 90)")


@dataclass(frozen=True)
class BlockSpec:
    range: Optional[float] = None
    rows_cols: Optional[tuple[int, int]] = None
    folds: int = 5
    selection: str = "random"

    def __post_init__(self):
        if (self.range is None) == (self.rows_cols is None):
            raise PartitionError("give exactly one of range or rows_cols")
        if self.range is not None and not (math.isfinite(self.range) and self.range > 0):
            raise PartitionError("range must be positive")
        if self.rows_cols is not None and (len(self.rows_cols) != 2 or min(self.rows_cols) < 1):
            raise PartitionError("rows_cols must be two positive counts")
        if self.selection not in SELECTIONS:
            raise PartitionError(f"selection must be one of {SELECTIONS}")
        if self.selection == "checkerboard":
            object.__setattr__(self, "folds", 2)
        if self.folds < 2:
            raise PartitionError("folds must be >= 2")


@dataclass(frozen=True)
class _Grid:
    x0: float
    y0: float
    w: float
    h: float
    rows: int
    cols: int

    def locate(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Top-origin row and column of every point."""
        col = np.zeros(len(pts), dtype=np.int64)
        rb = np.zeros(len(pts), dtype=np.int64)
        if self.w > 0:
            col = np.clip(np.floor((pts[:, 0] - self.x0) / self.w).astype(np.int64), 0, self.cols - 1)
        if self.h > 0:
            rb = np.clip(np.floor((pts[:, 1] - self.y0) / self.h).astype(np.int64), 0, self.rows - 1)
        return self.rows - 1 - rb, col

    def rect(self, row: int, col: int):
        rb = self.rows - 1 - row
        return (
            (self.x0 + col * self.w, self.y0 + rb * self.h),
            (self.x0 + (col + 1) * self.w, self.y0 + (rb + 1) * self.h),
        )


def _bbox(pts: np.ndarray):
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    return lo, hi - lo


def _grid_by_count(pts: np.ndarray, rows: int, cols: int) -> _Grid:
    lo, ext = _bbox(pts)
    return _Grid(lo[0], lo[1], ext[0] / cols, ext[1] / rows, rows, cols)


def _grid_by_size(pts: np.ndarray, dx: float, dy: float) -> _Grid:
    lo, ext = _bbox(pts)
    cols = max(1, math.ceil(ext[0] / dx))
    rows = max(1, math.ceil(ext[1] / dy))
    return _Grid(lo[0], lo[1], dx, dy, rows, cols)


def rotate(coords: np.ndarray, degrees: float) -> np.ndarray:
    """Rotate points by ``-degrees`` about their bounding-box center."""
    if degrees == 0:
        return coords
    lo, hi = coords.min(axis=0), coords.max(axis=0)
    c = (lo + hi) / 2
    t = math.radians(-degrees)
    rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    return (coords - c) @ rot.T + c


def tile_labels(coords: np.ndarray, spec: TileSpec) -> tuple[np.ndarray, _Grid]:
    """Row-major grid cell index of each point (before merging)."""
    pts = rotate(np.asarray(coords, dtype=float), spec.rotation)
    if spec.nsplit is not None:
        rows, cols = spec.nsplit
        _, ext = _bbox(pts)
        if rows * cols > 1 and np.all(ext == 0):
            raise PartitionError("all points coincide; cannot split into tiles")
        grid = _grid_by_count(pts, rows, cols)
    else:
        grid = _grid_by_size(pts, *spec.dsplit)
    row, col = grid.locate(pts)
    return row * grid.cols + col, grid


def merge_small_tiles(cells: np.ndarray, grid: _Grid, threshold: float) -> np.ndarray:
    """Merge tiles with fewer than ``threshold`` points into a 4-neighbor.

    Small tiles are handled in ascending count (ties: lowest index); each goes
    to its largest-count adjacent nonempty tile (ties: lowest index). A tile
    with no occupied neighbor goes to the nearest tile by cell-center
    distance. Returns the surviving tile id of each point.
    """
    regions: dict[int, set[int]] = {}
    counts: dict[int, int] = {}
    for c, cnt in zip(*np.unique(cells, return_counts=True)):
        regions[int(c)] = {int(c)}
        counts[int(c)] = int(cnt)
    owner = {c: c for c in regions}

    while len(regions) > 1:
        small = [r for r in regions if counts[r] < threshold]
        if not small:
            break
        rid = min(small, key=lambda r: (counts[r], r))
        neigh = set()
        for cell in regions[rid]:
            row, col = divmod(cell, grid.cols)
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                rr, cc = row + dr, col + dc
                if 0 <= rr < grid.rows and 0 <= cc < grid.cols:
                    other = owner.get(rr * grid.cols + cc)
                    if other is not None and other != rid:
                        neigh.add(other)
        if not neigh:
            def gap(r):
                return min(
                    math.hypot(a // grid.cols - b // grid.cols, a % grid.cols - b % grid.cols)
                    for a in regions[rid]
                    for b in regions[r]
                )

            dist = {r: gap(r) for r in regions if r != rid}
            best = min(dist.values())
            neigh = {r for r, d in dist.items() if d == best}
        target = min(neigh, key=lambda r: (-counts[r], r))
        for cell in regions[rid]:
            owner[cell] = target
        regions[target] |= regions.pop(rid)
        counts[target] += counts.pop(rid)

    return np.array([owner[int(c)] for c in cells], dtype=np.int64)


def _tiles_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    spec = TileSpec(
        nsplit=params.get("nsplit"),
        dsplit=params.get("dsplit"),
        rotation=params.get("rotation", 0.0),
        min_n=params.get("min_n"),
        min_frac=params.get("min_frac"),
    )
    if spec.min_n is not None and spec.min_n >= task.n:
        raise PartitionError(f"min_n={spec.min_n} must be smaller than n={task.n}")
    cells, grid = tile_labels(task.coords, spec)
    threshold = 0.0
    if spec.min_n is not None:
        threshold = spec.min_n
    elif spec.min_frac is not None:
        threshold = spec.min_frac * task.n
    if threshold > 0:
        cells = merge_small_tiles(cells, grid, threshold)
    tile_ids = np.unique(cells)
    label = np.searchsorted(tile_ids, cells)
    geometry = None
    if spec.rotation == 0 and threshold == 0:
        geometry = {j + 1: grid.rect(*divmod(int(t), grid.cols)) for j, t in enumerate(tile_ids)}
    blocks = BlockSet(label + 1, len(tile_ids), "geometric", geometry)
    folds = [
        Fold.from_indices(j + 1, np.flatnonzero(label == j), np.flatnonzero(label != j), (), repeat)
        for j in range(len(tile_ids))
    ]
    return folds, blocks


def spcv_tiles(
    task: Task,
    nsplit: Optional[tuple[int, int]] = None,
    dsplit=None,
    rotation: float = 0.0,
    min_n: Optional[int] = None,
    min_frac: Optional[float] = None,
    seed: int = 0,
):
    """Leave-one-tile-out over a (rows, cols) grid or a grid of (dx, dy) tiles.

    Empty tiles are dropped, so fewer folds than grid cells may result.
    """
    if dsplit is not None and np.ndim(dsplit) == 0:
        dsplit = (float(dsplit), float(dsplit))
    params: dict[str, Any] = {
        "nsplit": None if nsplit is None else tuple(int(v) for v in nsplit),
        "dsplit": None if dsplit is None else tuple(float(v) for v in dsplit),
        "rotation": float(rotation),
        "min_n": None if min_n is None else int(min_n),
        "min_frac": None if min_frac is None else float(min_frac),
    }
    f, blocks = _tiles_folds(task, params, None, 1)
    return assemble("spcv_tiles", params, seed, [f], blocks)


def block_grid(coords: np.ndarray, spec: BlockSpec):
    """Grid and per-point (row, col) for the square or rows x cols blocks."""
    pts = np.asarray(coords, dtype=float)
    if spec.range is not None:
        grid = _grid_by_size(pts, spec.range, spec.range)
    else:
        grid = _grid_by_count(pts, *spec.rows_cols)
    row, col = grid.locate(pts)
    return grid, row, col


def systematic_fold(block: int, k: int) -> int:
    """1-based fold of 1-based block number: blocks ``i + j*k`` go to fold ``i``."""
    return (block - 1) % k + 1


def _block_folds(task: Task, params: dict[str, Any], rng, repeat: int):
    rows_cols = params.get("rows_cols")
    spec = BlockSpec(
        range=params.get("range"),
        rows_cols=None if rows_cols is None else tuple(rows_cols),
        folds=params["folds"],
        selection=params.get("selection", "random"),
    )
    grid, row, col = block_grid(task.coords, spec)
    cell = row * grid.cols + col
    occupied = np.unique(cell)
    n_z = len(occupied)
    block = np.searchsorted(occupied, cell) + 1
    k = spec.folds
    if n_z < k:
        raise PartitionError(f"only {n_z} nonempty blocks for {k} folds")

    if spec.selection == "random":
        fold_of_block = deal(n_z, k, rng)
    elif spec.selection == "systematic":
        fold_of_block = np.array([systematic_fold(b, k) - 1 for b in range(1, n_z + 1)])
    else:
        r, c = np.divmod(occupied, grid.cols)
        fold_of_block = (r + c) % 2
        if len(np.unique(fold_of_block)) < 2:
            raise PartitionError("checkerboard needs nonempty blocks of both colors")

    geometry = {b: grid.rect(*divmod(int(occupied[b - 1]), grid.cols)) for b in range(1, n_z + 1)}
    blocks = BlockSet(block, n_z, "geometric", geometry)
    obs_fold = fold_of_block[block - 1]
    folds = [
        Fold.from_indices(j + 1, np.flatnonzero(obs_fold == j), np.flatnonzero(obs_fold != j), (), repeat)
        for j in range(k)
    ]
    return folds, blocks


def spcv_block(
    task: Task,
    range: Optional[float] = None,
    rows_cols: Optional[tuple[int, int]] = None,
    folds: int = 5,
    selection: str = "random",
    seed: int = 0,
):
    """CV at the block level over square blocks of side ``range`` anchored at
    the bounding box's lower-left corner, or over a ``rows_cols`` grid.

    Nonempty blocks are numbered row by row from the top-left and dealt into
    folds randomly, systematically (block ``b`` to fold ``(b - 1) % k + 1``),
    or as a two-fold checkerboard.
    """
    spec = BlockSpec(
        range=None if range is None else float(range),
        rows_cols=None if rows_cols is None else (int(rows_cols[0]), int(rows_cols[1])),
        folds=int(folds),
        selection=selection,
    )
    params = {"range": spec.range, "rows_cols": spec.rows_cols, "folds": spec.folds, "selection": spec.selection}
    f, blocks = _block_folds(task, params, make_rng(seed), 1)
    return assemble("spcv_block", params, seed, [f], blocks)
