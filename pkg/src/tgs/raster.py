"""Classification of complex-plane grids and contour extraction."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from skimage import measure

from .errors import BadBox, InputError
from .gersgorin import Box, DiskSet, disk_set_contains_many
from .minimal import VFunction
from .spectral import DEFAULT_TOL
from .tensor import ComplexTensor

OUTSIDE, INSIDE, BAND = 0, 1, 2


@dataclass
class RasterGrid:
    """Node classification on an nx-by-ny lattice spanning ``box``.

    ``cells[p, q]`` refers to z = xmin + p*dx + i*(ymin + q*dy).
    """

    box: Box
    nx: int
    ny: int
    cells: np.ndarray
    v_lower: np.ndarray | None = None
    v_upper: np.ndarray | None = None

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.box[0], self.box[1], self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.box[2], self.box[3], self.ny)

    def nodes(self) -> np.ndarray:
        return grid_nodes(self.box, self.nx, self.ny)

    def node(self, p: int, q: int) -> complex:
        return complex(self.xs[p], self.ys[q])

    def counts(self) -> dict[str, int]:
        return {
            "inside": int(np.sum(self.cells == INSIDE)),
            "outside": int(np.sum(self.cells == OUTSIDE)),
            "band": int(np.sum(self.cells == BAND)),
        }


def check_grid(box: Sequence[float], nx: int, ny: int) -> Box:
    if len(box) != 4:
        raise BadBox("box needs four numbers xmin, xmax, ymin, ymax")
    xmin, xmax, ymin, ymax = (float(b) for b in box)
    if not (np.isfinite([xmin, xmax, ymin, ymax]).all() and xmin < xmax and ymin < ymax):
        raise BadBox(f"degenerate box {box}")
    if nx < 2 or ny < 2:
        raise InputError("grid needs at least 2 nodes per axis")
    return (xmin, xmax, ymin, ymax)


def grid_nodes(box: Box, nx: int, ny: int) -> np.ndarray:
    xs = np.linspace(box[0], box[1], nx)
    ys = np.linspace(box[2], box[3], ny)
    return xs[:, None] + 1j * ys[None, :]


def default_threads() -> int:
    env = os.environ.get("TGS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"TGS_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def raster_membership(A: ComplexTensor, box: Sequence[float], nx: int, ny: int,
                      tol: float = DEFAULT_TOL, threads: int | None = None) -> RasterGrid:
    """Classify every node by its certified v bracket (Inside / Outside / Band)."""
    box = check_grid(box, nx, ny)
    zs = grid_nodes(box, nx, ny).ravel()
    vf = VFunction(A, tol)
    threads = threads or default_threads()
    rows = np.array_split(np.arange(len(zs)), max(1, min(threads, len(zs) // 4096 or 1)))
    lo = np.empty(len(zs))
    hi = np.empty(len(zs))

    def work(sel: np.ndarray) -> None:
        lo[sel], hi[sel], _ = vf.many(zs[sel])

    # results are written by position, so thread scheduling cannot change them
    if len(rows) == 1:
        work(rows[0])
    else:
        with ThreadPoolExecutor(len(rows)) as pool:
            list(pool.map(work, rows))
    cells = np.full(len(zs), BAND, dtype=np.int8)
    cells[lo >= 0] = INSIDE
    cells[hi < 0] = OUTSIDE
    shape = (nx, ny)
    return RasterGrid(box, nx, ny, cells.reshape(shape), lo.reshape(shape), hi.reshape(shape))


UNION = "union-of-each"
INTERSECTION = "intersection-of-unions"


def raster_disk_sets(sets: Sequence[DiskSet], mode: str, box: Sequence[float], nx: int,
                     ny: int, margin: float = 0.0) -> RasterGrid:
    """Classify nodes against several disk unions, combined by union or intersection."""
    if not sets:
        raise InputError("at least one DiskSet is required")
    if mode not in (UNION, INTERSECTION):
        raise InputError(f"unknown mode {mode!r}")
    box = check_grid(box, nx, ny)
    zs = grid_nodes(box, nx, ny)
    hits = [disk_set_contains_many(s, zs, margin) for s in sets]
    inside = np.logical_or.reduce(hits) if mode == UNION else np.logical_and.reduce(hits)
    cells = np.where(inside, INSIDE, OUTSIDE).astype(np.int8)
    return RasterGrid(box, nx, ny, cells)


def extract_contours(grid: RasterGrid) -> list[np.ndarray]:
    """Marching-squares boundaries of the Inside/Band region as complex polylines.

    Closed chains repeat their first point at the end; chains that meet the
    box edge are left open.
    """
    field = (grid.cells != OUTSIDE).astype(float)
    if field.min() == field.max():
        return []
    dx = (grid.box[1] - grid.box[0]) / (grid.nx - 1)
    dy = (grid.box[3] - grid.box[2]) / (grid.ny - 1)
    out = []
    for c in measure.find_contours(field, 0.5):
        out.append((grid.box[0] + c[:, 0] * dx) + 1j * (grid.box[2] + c[:, 1] * dy))
    return out
