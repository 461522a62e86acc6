"""Classical morphological algorithms on top of the growing engine.

Each operation wires its own ordering function, queue bank and growth policy
around a ``Population``:

* ``voronoi`` — influence zones of seeds at constant speed, boundary on ties
* ``domain_to_clusters`` — connected components by scan-and-flood
* ``regional_minima`` — level-connected sets with no lower outer neighbor
* ``distance`` — geodesic distance by breadth-first wavefronts (flip-flop queues)
* ``watershed`` — level-by-level immersion from labelled seeds
* ``geodesic_reconstruction`` and friends — valley filling by merging floods
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .engine import (
    NO_OWNER,
    OUT,
    SELF_ONLY,
    Geometry,
    GrowthPolicy,
    Population,
    SystemQueue,
    Tribe,
)
from .grid import GridImage, Neighborhood, complement, add_saturating, dual_neighborhood

UNASSIGNED = -1
BOUNDARY = -2

UNREACHED = -1


def _linear(dims, coord) -> int:
    idx = 0
    stride = 1
    if len(coord) != len(dims):
        raise IndexError(f"coordinate {tuple(coord)} has wrong arity for dims {tuple(dims)}")
    for c, e in zip(coord, dims):
        if not 0 <= c < e:
            raise IndexError(f"coordinate {tuple(coord)} out of bounds for dims {tuple(dims)}")
        idx += c * stride
        stride *= e
    return idx


class LabelMap:
    """Per-pixel region labels; UNASSIGNED and BOUNDARY are negative sentinels."""

    __slots__ = ("dims", "labels")

    def __init__(self, dims, labels):
        self.dims = tuple(dims)
        self.labels = list(labels)

    def get(self, coord) -> int:
        return self.labels[_linear(self.dims, coord)]

    def region_labels(self) -> set:
        return {v for v in self.labels if v >= 0}

    def region_sizes(self) -> dict:
        sizes: dict = {}
        for v in self.labels:
            if v >= 0:
                sizes[v] = sizes.get(v, 0) + 1
        return sizes

    def boundary_count(self) -> int:
        return self.labels.count(BOUNDARY)

    def components(self) -> dict:
        """label -> set of coordinates, for partition comparisons."""
        dims = self.dims
        out: dict = {}
        coords = _scan_coords(dims)
        for c, v in zip(coords, self.labels):
            if v >= 0:
                out.setdefault(v, set()).add(c)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, LabelMap)
            and self.dims == other.dims
            and self.labels == other.labels
        )

    def __repr__(self):
        return f"LabelMap(dims={self.dims}, regions={len(self.region_labels())})"


class DistanceMap:
    """Per-pixel geodesic distance; UNREACHED marks pixels no wave arrived at."""

    __slots__ = ("dims", "values")

    def __init__(self, dims, values):
        self.dims = tuple(dims)
        self.values = list(values)

    def get(self, coord) -> int:
        return self.values[_linear(self.dims, coord)]

    def __eq__(self, other):
        return (
            isinstance(other, DistanceMap)
            and self.dims == other.dims
            and self.values == other.values
        )

    def __repr__(self):
        reached = sum(1 for v in self.values if v != UNREACHED)
        return f"DistanceMap(dims={self.dims}, reached={reached})"


@dataclass
class MinimaResult:
    """Level-connected decomposition plus the labels flagged as regional minima."""

    labels: LabelMap
    minima: frozenset


def _scan_coords(dims):
    """All coordinates in canonical scan order (first axis fastest)."""
    if len(dims) == 1:
        return [(x,) for x in range(dims[0])]
    if len(dims) == 2:
        w, h = dims
        return [(x, y) for y in range(h) for x in range(w)]
    w, h, d = dims
    return [(x, y, z) for z in range(d) for y in range(h) for x in range(w)]


def _ordered(pixels):
    """Seed pixels in canonical scan order, for reproducible growth."""
    return sorted((tuple(c) for c in pixels), key=lambda c: c[::-1])


def _check_restrict(dims, restrict: Optional[GridImage]):
    if restrict is not None and restrict.dims != tuple(dims):
        raise ValueError(f"restriction dims {restrict.dims} do not match {tuple(dims)}")


def _check_seeds(dims, seeds, restrict: Optional[GridImage] = None):
    ndim = len(dims)
    seen: dict = {}
    for label, pixels in enumerate(seeds):
        for c in pixels:
            c = tuple(c)
            if len(c) != ndim:
                raise ValueError(f"seed pixel {c} has wrong arity for dims {tuple(dims)}")
            for comp, e in zip(c, dims):
                if not 0 <= comp < e:
                    raise ValueError(f"seed pixel {c} out of bounds for dims {tuple(dims)}")
            if c in seen:
                raise ValueError(f"seed pixel {c} used by labels {seen[c]} and {label}")
            seen[c] = label
            if restrict is not None and restrict.values[_linear(dims, c)] == 0:
                raise ValueError(f"seed pixel {c} lies outside the restriction domain")


def _labels_from_owner(pop: Population, geo: Geometry, translate) -> LabelMap:
    labels = [translate[o] if o >= 0 else UNASSIGNED for o in geo.unpad(pop.owner)]
    return LabelMap(geo.dims, labels)


# ---------------------------------------------------------------------------
# single-queue algorithms


def voronoi(dims, seeds: Sequence, v: Neighborhood, restrict: Optional[GridImage] = None) -> LabelMap:
    """Influence zones of the seeds under constant-speed growth.

    Every reachable pixel gets its nearest seed's label; pixels contested by
    two or more zones when popped become BOUNDARY.  With ``restrict``, growth
    never leaves the nonzero domain and outside pixels stay UNASSIGNED.
    """
    geo = Geometry(dims)
    _check_restrict(dims, restrict)
    _check_seeds(dims, seeds, restrict)
    if restrict is None:
        def delta(x, i):
            return 0
    else:
        ipad = geo.pad(restrict.values)

        def delta(x, i):
            return 0 if ipad[x] else OUT

    sq = SystemQueue(delta, 1)
    pop = Population(geo, sq)
    boundary = pop.create_region(Tribe.passive())
    tribe = Tribe(v)
    translate = [BOUNDARY]
    for label, pixels in enumerate(seeds):
        rid = pop.create_region(tribe)
        translate.append(label)
        for c in _ordered(pixels):
            pop.grow(geo.index(c), rid)
    sq.select_queue(0)
    apply_policy = pop.apply_policy
    pop_valid = pop.pop_valid
    while (c := pop_valid()) is not None:
        apply_policy(c[0], c[1], GrowthPolicy.INVARIANT_BOUNDARY, boundary)
    return _labels_from_owner(pop, geo, translate)


def domain_to_clusters(image: GridImage, v: Neighborhood) -> LabelMap:
    """Connected components of the nonzero domain, labelled in scan order."""
    geo = Geometry(image.dims)
    ipad = geo.pad(image.values)

    def delta(x, i):
        return 0 if ipad[x] else OUT

    sq = SystemQueue(delta, 1)
    pop = Population(geo, sq)
    tribe = Tribe(v)
    sq.select_queue(0)
    pop_valid = pop.pop_valid
    grow = pop.grow
    count = 0
    for row in geo.interior_rows():
        for x in row:
            if ipad[x]:
                rid = pop.create_region(tribe)
                count += 1
                grow(x, rid)
                ipad[x] = 0
                while (c := pop_valid()) is not None:
                    y, i = c
                    grow(y, i)
                    ipad[y] = 0
    return _labels_from_owner(pop, geo, list(range(count)))


def remove_border_components(labels: LabelMap) -> LabelMap:
    """Drop every component that intersects the grid border."""
    dims = labels.dims
    doomed = set()
    for k, lab in enumerate(labels.labels):
        if lab >= 0 and _on_border(k, dims):
            doomed.add(lab)
    return LabelMap(dims, [UNASSIGNED if v >= 0 and v in doomed else v for v in labels.labels])


def _on_border(k: int, dims) -> bool:
    for e in dims:
        c = k % e
        if c == 0 or c == e - 1:
            return True
        k //= e
    return False


def fill_holes(image: GridImage, v: Neighborhood) -> GridImage:
    """Set to 1 every background component that does not touch the border.

    Background components are taken under the dual connectivity of ``v``
    (4<->8 in 2D, 6<->26 in 3D).
    """
    holes = remove_border_components(domain_to_clusters(complement(image), dual_neighborhood(v)))
    out = [1 if f or lab >= 0 else 0 for f, lab in zip(image.values, holes.labels)]
    return GridImage(image.dims, out)


def max_cluster(labels: LabelMap) -> LabelMap:
    """Keep only the largest-area component (smallest label wins ties)."""
    sizes = labels.region_sizes()
    if not sizes:
        return LabelMap(labels.dims, [UNASSIGNED] * len(labels.labels))
    best = max(sorted(sizes), key=lambda lab: sizes[lab])
    return LabelMap(labels.dims, [v if v == best else UNASSIGNED for v in labels.labels])


def regional_minima(f: GridImage, v: Neighborhood) -> MinimaResult:
    """Decompose into level-connected sets and flag the regional minima.

    A set is a regional minimum when every pixel of its outer boundary is
    strictly higher.  Each scan hit floods one level set; any popped couple
    sitting below the flood level disproves the minimum.
    """
    geo = Geometry(f.dims)
    fpad = geo.pad(f.values)
    level = 0

    def delta(x, i):
        return 0 if fpad[x] <= level else OUT

    sq = SystemQueue(delta, 1)
    pop = Population(geo, sq)
    tribe = Tribe(v, SELF_ONLY)
    sq.select_queue(0)
    owner = pop.owner
    grow = pop.grow
    raw_pop = sq.pop
    flags = []
    for row in geo.interior_rows():
        for x in row:
            if owner[x] == NO_OWNER:
                level = fpad[x]
                rid = pop.create_region(tribe)
                grow(x, rid)
                is_minimum = True
                while (c := raw_pop()) is not None:
                    y, i = c
                    if fpad[y] < level:
                        is_minimum = False
                    else:
                        grow(y, i)
                flags.append(is_minimum)
    labels = _labels_from_owner(pop, geo, list(range(len(flags))))
    return MinimaResult(labels, frozenset(i for i, ok in enumerate(flags) if ok))


# ---------------------------------------------------------------------------
# multi-queue algorithms


def distance(dims, seeds: Sequence, v: Neighborhood, restrict: Optional[GridImage] = None) -> DistanceMap:
    """Geodesic distance to the seeds, one breadth-first wavefront per step.

    Two queues alternate: the wave at distance d drains from one while its
    successors at d+1 collect in the other.  Seed pixels are 0; pixels no
    wave reaches stay UNREACHED.
    """
    geo = Geometry(dims)
    _check_restrict(dims, restrict)
    _check_seeds(dims, seeds, restrict)
    flip = 0
    if restrict is None:
        def delta(x, i):
            return flip
    else:
        ipad = geo.pad(restrict.values)

        def delta(x, i):
            return flip if ipad[x] else OUT

    sq = SystemQueue(delta, 2)
    pop = Population(geo, sq)
    tribe = Tribe(v)
    dist = [UNREACHED] * geo.size
    for pixels in seeds:
        rid = pop.create_region(tribe)
        for c in _ordered(pixels):
            p = geo.index(c)
            pop.grow(p, rid)
            dist[p] = 0
    flop = 1
    d = 0
    pop_valid = pop.pop_valid
    grow = pop.grow
    while not sq.all_empty():
        flip, flop = flop, flip
        sq.select_queue(flop)
        d += 1
        while (c := pop_valid()) is not None:
            x, i = c
            grow(x, i)
            dist[x] = d
    return DistanceMap(dims, geo.unpad(dist))


def watershed(
    f: GridImage,
    seeds: Sequence,
    v: Neighborhood,
    restrict: Optional[GridImage] = None,
    creation_order: Optional[Sequence] = None,
) -> LabelMap:
    """Flood the topographic surface ``f`` from labelled seeds, level by level.

    One queue per grey level; pops at each immersion level grow their basin,
    and a contested pixel becomes BOUNDARY when popped by the smallest
    contending region.  ``creation_order`` permutes the internal creation of
    seed regions while keeping output labels; the result does not depend on
    it.
    """
    dims = f.dims
    geo = Geometry(dims)
    _check_restrict(dims, restrict)
    _check_seeds(dims, seeds, restrict)
    order = list(range(len(seeds))) if creation_order is None else list(creation_order)
    if sorted(order) != list(range(len(seeds))):
        raise ValueError("creation_order must be a permutation of the seed indices")
    fmin = min(f.values)
    fmax = max(f.values)
    fpad = geo.pad(f.values)
    level = fmin
    if restrict is None:
        def delta(x, i):
            fx = fpad[x]
            return (fx if fx > level else level) - fmin
    else:
        ipad = geo.pad(restrict.values)

        def delta(x, i):
            if not ipad[x]:
                return OUT
            fx = fpad[x]
            return (fx if fx > level else level) - fmin

    sq = SystemQueue(delta, fmax - fmin + 1)
    pop = Population(geo, sq)
    boundary = pop.create_region(Tribe.passive())
    tribe = Tribe(v)
    translate = [BOUNDARY] + [UNASSIGNED] * len(seeds)
    for label in order:
        rid = pop.create_region(tribe)
        translate[rid] = label
        for c in _ordered(seeds[label]):
            pop.grow(geo.index(c), rid)
    pop_valid = pop.pop_valid
    apply_policy = pop.apply_policy
    for level in range(fmin, fmax + 1):
        sq.select_queue(level - fmin)
        while (c := pop_valid()) is not None:
            apply_policy(c[0], c[1], GrowthPolicy.WATERSHED_BOUNDARY, boundary)
    return _labels_from_owner(pop, geo, translate)


def geodesic_reconstruction(f: GridImage, g: GridImage, v: Neighborhood) -> GridImage:
    """Erode ``f`` toward ``g`` until nothing moves.

    Equivalent to iterating pointwise max(erosion, g) to its fixed point, but
    computed in one pass: the regional minima of ``f`` act as pouring points,
    each valley floods upward and the immersion level at which a pixel is
    absorbed is its output value.
    """
    if f.dims != g.dims:
        raise ValueError(f"dims differ: {f.dims} vs {g.dims}")
    if any(a < b for a, b in zip(f.values, g.values)):
        raise ValueError("f must dominate g pointwise")
    geo = Geometry(f.dims)
    mins = regional_minima(f, v)
    pour_points = [(p, f.values[k]) for p, k in _flagged_first_pixels(mins, geo)]
    return _merge_flood(geo, g, v, pour_points, min(f.values), max(f.values))


def _flagged_first_pixels(mins: MinimaResult, geo: Geometry) -> list:
    """(padded index, linear index) of the scan-first pixel of each flagged minimum."""
    first: dict = {}
    flagged = mins.minima
    for k, lab in enumerate(mins.labels.labels):
        if lab in flagged and lab not in first:
            first[lab] = k
    rows = geo.interior_rows()
    w = geo.dims[0]
    return [(rows[k // w][k % w], k) for k in (first[lab] for lab in sorted(first))]


def _merge_flood(geo: Geometry, g: GridImage, v: Neighborhood, pour_points, lo: int, hi: int) -> GridImage:
    """Shared immersion loop of the reconstruction variants.

    ``pour_points`` are (padded pixel index, height) pairs; each creates a
    region when the immersion level reaches its height, unless some flood
    already owns the pixel.  Every grown pixel records the current level.
    """
    gpad = geo.pad(g.values)
    level = lo

    def delta(x, i):
        gx = gpad[x]
        return (gx if gx > level else level) - lo

    sq = SystemQueue(delta, hi - lo + 1)
    pop = Population(geo, sq)
    tribe = Tribe(v)
    out = [0] * geo.size
    owner = pop.owner
    grow = pop.grow
    pop_valid = pop.pop_valid
    for level in range(lo, hi + 1):
        for p, height in pour_points:
            if height == level and owner[p] == NO_OWNER:
                rid = pop.create_region(tribe)
                grow(p, rid)
                out[p] = level
        sq.select_queue(level - lo)
        while (c := pop_valid()) is not None:
            x, i = c
            grow(x, i)
            out[x] = level
    return GridImage(geo.dims, geo.unpad(out))


def dynamic_filter(g: GridImage, h: int, v: Neighborhood) -> GridImage:
    """Fill every valley of depth smaller than ``h``."""
    return geodesic_reconstruction(add_saturating(g, h), g, v)


def marker_reconstruction(g: GridImage, seeds: Sequence, v: Neighborhood) -> GridImage:
    """Reconstruction with the image pinned at the seeds and free elsewhere.

    Equivalent to eroding a function equal to ``g`` on the seed pixels and
    arbitrarily high elsewhere: all minima except the markers are suppressed.
    """
    dims = g.dims
    geo = Geometry(dims)
    _check_seeds(dims, seeds)
    pour_points = []
    for group in seeds:
        for c in _ordered(group):
            pour_points.append((geo.index(c), g.values[_linear(dims, c)]))
    if not pour_points:
        raise ValueError("marker reconstruction needs at least one seed pixel")
    return _merge_flood(geo, g, v, pour_points, min(g.values), max(g.values))
