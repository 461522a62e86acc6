"""Brute-force reference implementations used as ground truth in tests.

These take none of the engine's shortcuts: plain breadth-first search, plain
union-find, exhaustive neighborhood scans, and the textbook iterate-until-
fixed-point reconstruction.  They are deliberately simple and may be orders
of magnitude slower than the engine.
"""

from __future__ import annotations

from collections import deque
from typing import Optional, Sequence

import numpy as np

from .algorithms import DistanceMap, MinimaResult, LabelMap, UNREACHED, _linear, _scan_coords
from .grid import GridImage, Neighborhood, neighbors


def bfs_distance(dims, seeds: Sequence, v: Neighborhood, restrict: Optional[GridImage] = None) -> DistanceMap:
    """Multi-source breadth-first geodesic distance; exact by construction."""
    dims = tuple(dims)
    if restrict is not None and restrict.dims != dims:
        raise ValueError(f"restriction dims {restrict.dims} do not match {dims}")
    inside = None
    if restrict is not None:
        inside = restrict.values
    dist: dict = {}
    queue = deque()
    for label, pixels in enumerate(seeds):
        for c in pixels:
            c = tuple(c)
            if len(c) != len(dims) or any(not 0 <= a < e for a, e in zip(c, dims)):
                raise ValueError(f"seed pixel {c} out of bounds for dims {dims}")
            if inside is not None and not inside[_linear(dims, c)]:
                raise ValueError(f"seed pixel {c} lies outside the restriction domain")
            if c in dist:
                raise ValueError(f"seed pixel {c} used twice")
            dist[c] = 0
            queue.append(c)
    while queue:
        x = queue.popleft()
        d = dist[x] + 1
        for y in neighbors(x, v, dims):
            if y not in dist and (inside is None or inside[_linear(dims, y)]):
                dist[y] = d
                queue.append(y)
    values = [dist.get(c, UNREACHED) for c in _scan_coords(dims)]
    return DistanceMap(dims, values)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def unionfind_clusters(image: GridImage, v: Neighborhood) -> list:
    """Connected components of the nonzero domain via union-find.

    Returns the canonical partition: a list of frozensets of coordinates,
    ordered by each component's scan-first pixel.
    """
    dims = image.dims
    uf = _UnionFind()
    coords = _scan_coords(dims)
    values = image.values
    fg = [c for c, val in zip(coords, values) if val]
    for c in fg:
        uf.add(c)
    fgset = set(fg)
    for c in fg:
        for y in neighbors(c, v, dims):
            if y in fgset:
                uf.union(c, y)
    groups: dict = {}
    for c in fg:  # fg is in scan order, so first insertion orders the groups
        groups.setdefault(uf.find(c), set()).add(c)
    return [frozenset(s) for s in groups.values()]


def naive_minima(f: GridImage, v: Neighborhood) -> MinimaResult:
    """Level-connected components by flood fill; flag those with no lower outer neighbor."""
    dims = f.dims
    values = f.values
    labels = [-1] * len(values)
    flagged = []
    coords = _scan_coords(dims)
    index = {c: k for k, c in enumerate(coords)}
    next_label = 0
    for start_k, start in enumerate(coords):
        if labels[start_k] != -1:
            continue
        level = values[start_k]
        component = [start]
        labels[start_k] = next_label
        queue = deque([start])
        is_min = True
        while queue:
            x = queue.popleft()
            for y in neighbors(x, v, dims):
                ky = index[y]
                if values[ky] == level:
                    if labels[ky] == -1:
                        labels[ky] = next_label
                        component.append(y)
                        queue.append(y)
                elif values[ky] < level:
                    is_min = False
        if is_min:
            flagged.append(next_label)
        next_label += 1
    return MinimaResult(LabelMap(dims, labels), frozenset(flagged))


def _to_array(img: GridImage) -> np.ndarray:
    return np.asarray(img.values, dtype=np.int64).reshape(tuple(reversed(img.dims)))


def _from_array(arr: np.ndarray, dims) -> GridImage:
    return GridImage(dims, arr.reshape(-1).tolist())


def _shift_min(acc: np.ndarray, src: np.ndarray, offset) -> None:
    """acc = min(acc, src translated by -offset), out-of-bounds cells ignored."""
    # numpy axes run slowest-first, grid offsets run (x, y[, z]); reverse them
    src_slices = []
    dst_slices = []
    for o in reversed(offset):
        n = None
        if o > 0:
            src_slices.append(slice(o, None))
            dst_slices.append(slice(None, -o))
        elif o < 0:
            src_slices.append(slice(None, o))
            dst_slices.append(slice(-o, None))
        else:
            src_slices.append(slice(None))
            dst_slices.append(slice(None))
    dst = acc[tuple(dst_slices)]
    np.minimum(dst, src[tuple(src_slices)], out=dst)


def iterative_erosion_reconstruction(f: GridImage, g: GridImage, v: Neighborhood) -> GridImage:
    """Iterate pointwise max(erosion(E), g) from E=f until the fixed point.

    The erosion is the minimum over the closed neighborhood (offsets plus the
    center); borders erode over in-bounds cells only.
    """
    if f.dims != g.dims:
        raise ValueError(f"dims differ: {f.dims} vs {g.dims}")
    F = _to_array(f)
    G = _to_array(g)
    if np.any(F < G):
        raise ValueError("f must dominate g pointwise")
    E = F
    while True:
        eroded = E.copy()
        for off in v.offsets:
            _shift_min(eroded, E, off)
        nxt = np.maximum(eroded, G)
        if np.array_equal(nxt, E):
            return _from_array(E, f.dims)
        E = nxt
