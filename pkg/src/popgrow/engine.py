"""Region-growing engine: zones of influence, queue system and growth policies.

A ``Population`` owns the whole mutable growing state: a set of regions (each
with a ``Tribe`` describing its zone-of-influence policy), per-pixel ownership,
per-pixel zone membership, and a bank of FIFO queues indexed by an algorithm-
supplied ordering function.  Algorithms drive it one pixel at a time: pop a
(pixel, region) couple, decide a policy, grow.

Pixels are addressed by flat indices over a one-cell-padded copy of the grid,
which removes per-neighbor bounds checks from the hot path.  ``Geometry``
holds the translation between coordinates and padded indices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional

from .grid import Neighborhood

# ordering-function sentinel: the couple is never stored
OUT = None

# owner-array sentinels
NO_OWNER = -1
BORDER = -2

# tribe restriction: which regions are carved out of the dilated set
ALL_REGIONS = 0
SELF_ONLY = 1

OrderingFunction = Callable[[int, int], Optional[int]]


class EngineError(RuntimeError):
    """A growth-contract violation (growing onto an owned pixel)."""


class Geometry:
    """Flat addressing for a grid with a one-cell sentinel border on every axis."""

    __slots__ = ("dims", "padded", "strides", "size", "_rows")

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(e) for e in dims)
        if not 1 <= len(dims) <= 3:
            raise ValueError(f"geometry needs 1 to 3 axes, got {len(dims)}")
        if any(e < 1 for e in dims):
            raise ValueError(f"every axis extent must be >= 1, got {dims}")
        self.dims = dims
        self.padded = tuple(e + 2 for e in dims)
        strides = [1]
        for e in self.padded[:-1]:
            strides.append(strides[-1] * e)
        self.strides = tuple(strides)
        size = 1
        for e in self.padded:
            size *= e
        self.size = size
        self._rows = None

    def index(self, coord) -> int:
        idx = 0
        for c, e, s in zip(coord, self.dims, self.strides):
            if not 0 <= c < e:
                raise IndexError(f"coordinate {tuple(coord)} out of bounds for dims {self.dims}")
            idx += (c + 1) * s
        return idx

    def coord(self, idx: int) -> tuple:
        out = []
        for e in self.padded:
            out.append(idx % e - 1)
            idx //= e
        return tuple(out)

    def linear_offsets(self, v: Neighborhood) -> tuple:
        if v.ndim != len(self.dims):
            raise ValueError(f"{v.ndim}D neighborhood on a {len(self.dims)}D grid")
        return tuple(sum(o * s for o, s in zip(off, self.strides)) for off in v.offsets)

    def interior_rows(self) -> list:
        """Contiguous index ranges covering the unpadded grid in scan order."""
        if self._rows is None:
            w = self.dims[0]
            bases = [0]
            for e, s in zip(self.dims[1:], self.strides[1:]):
                bases = [b + (c + 1) * s for b in bases for c in range(e)]
                bases.sort()
            self._rows = [range(b + 1, b + 1 + w) for b in sorted(bases)]
        return self._rows

    def interior(self):
        """All interior indices in canonical scan order (first axis fastest)."""
        for row in self.interior_rows():
            yield from row

    def pad(self, values, fill=0) -> list:
        """Copy a flat unpadded vector into padded layout; border cells get ``fill``."""
        out = [fill] * self.size
        w = self.dims[0]
        src = 0
        for row in self.interior_rows():
            out[row.start:row.stop] = values[src:src + w]
            src += w
        return out

    def unpad(self, padded) -> list:
        """Extract the interior of a padded vector in canonical scan order."""
        out = []
        for row in self.interior_rows():
            out.extend(padded[row.start:row.stop])
        return out


@dataclass(frozen=True)
class Tribe:
    """Zone-of-influence policy of a region.

    An active tribe dilates its region through ``neighborhood`` and keeps the
    zone clear of every region (``ALL_REGIONS``) or only of itself
    (``SELF_ONLY``).  A passive tribe (``neighborhood is None``) never has a
    zone; it is used for boundary regions that absorb contested pixels.
    """

    neighborhood: Optional[Neighborhood]
    restriction: int = ALL_REGIONS

    @classmethod
    def passive(cls) -> "Tribe":
        return cls(None)

    @property
    def is_passive(self) -> bool:
        return self.neighborhood is None


class GrowthPolicy(Enum):
    PLAIN = "plain"
    INVARIANT_BOUNDARY = "invariant_boundary"
    WATERSHED_BOUNDARY = "watershed_boundary"


class SystemQueue:
    """A bank of FIFO queues of (pixel, region) couples.

    The ordering function maps a couple to a queue index, or ``OUT`` to drop
    it.  One queue at a time is selected for popping.
    """

    __slots__ = ("delta", "queues", "selected", "_sel")

    def __init__(self, delta: OrderingFunction, queue_count: int):
        if queue_count < 1:
            raise ValueError("queue_count must be >= 1")
        self.delta = delta
        self.queues = [deque() for _ in range(queue_count)]
        self.selected = None
        self._sel = None

    def push(self, x: int, i: int) -> None:
        q = self.delta(x, i)
        if q is not OUT:
            self.queues[q].append((x, i))

    def select_queue(self, n: int) -> None:
        if not 0 <= n < len(self.queues):
            raise IndexError(f"queue index {n} out of range 0..{len(self.queues) - 1}")
        self.selected = n
        self._sel = self.queues[n]

    def pop(self):
        """Next couple of the selected queue in FIFO order, or None when empty."""
        sel = self._sel
        if sel is None:
            raise EngineError("no queue selected")
        if sel:
            return sel.popleft()
        return None

    def queue_empty(self) -> bool:
        if self._sel is None:
            raise EngineError("no queue selected")
        return not self._sel

    def all_empty(self) -> bool:
        return all(not q for q in self.queues)


class Population:
    """Regions, ownership, zones of influence and the queue system.

    The single mutable state of a growing process.  ``owner`` maps each padded
    pixel index to a region id (``NO_OWNER`` / ``BORDER`` sentinels) and
    ``zi`` maps a pixel to the list of region ids whose zone of influence
    currently contains it (pixels in no zone are absent).
    """

    __slots__ = ("geo", "sq", "owner", "zi", "tribes", "_offsets", "_restriction")

    def __init__(self, geometry: Geometry, sq: SystemQueue):
        self.geo = geometry
        self.sq = sq
        owner = [BORDER] * geometry.size
        w = geometry.dims[0]
        blank = [NO_OWNER] * w
        for row in geometry.interior_rows():
            owner[row.start:row.stop] = blank
        self.owner = owner
        self.zi = {}
        self.tribes = []
        self._offsets = []
        self._restriction = []

    # -- regions ------------------------------------------------------------

    def create_region(self, tribe: Tribe) -> int:
        """New empty region with the given tribe; ids are dense and creation-ordered."""
        rid = len(self.tribes)
        self.tribes.append(tribe)
        if tribe.is_passive:
            self._offsets.append(())
        else:
            self._offsets.append(self.geo.linear_offsets(tribe.neighborhood))
        self._restriction.append(tribe.restriction)
        return rid

    # -- growth -------------------------------------------------------------

    def grow(self, x: int, i: int) -> None:
        """Aggregate pixel ``x`` into region ``i`` and refresh zones and queues.

        ``x`` leaves the zones it no longer belongs to (all of them for
        all-regions zones, only region ``i``'s for self-only zones).  Each
        neighbor that thereby enters region ``i``'s zone is offered to the
        queue system exactly once.
        """
        owner = self.owner
        if owner[x] != NO_OWNER:
            raise EngineError(f"grow onto owned pixel {self.geo.coord(x)} (owner {owner[x]})")
        owner[x] = i
        zi = self.zi
        lst = zi.get(x)
        if lst is not None:
            restriction = self._restriction
            keep = [j for j in lst if j != i and restriction[j] == SELF_ONLY]
            if keep:
                zi[x] = keep
            else:
                del zi[x]
        offsets = self._offsets[i]
        if not offsets:
            return  # passive region: no zone, no pushes
        push = self.sq.push
        if self._restriction[i] == ALL_REGIONS:
            for o in offsets:
                y = x + o
                if owner[y] == NO_OWNER:
                    ylst = zi.get(y)
                    if ylst is None:
                        zi[y] = [i]
                        push(y, i)
                    elif i not in ylst:
                        ylst.append(i)
                        push(y, i)
        else:
            for o in offsets:
                y = x + o
                ow = owner[y]
                if ow != i and ow != BORDER:
                    ylst = zi.get(y)
                    if ylst is None:
                        zi[y] = [i]
                        push(y, i)
                    elif i not in ylst:
                        ylst.append(i)
                        push(y, i)

    def pop_valid(self):
        """Pop the next still-valid couple of the selected queue, or None.

        Couples whose pixel has been owned in the meantime, or has left the
        region's zone of influence, are silently discarded.
        """
        sq_pop = self.sq.pop
        owner = self.owner
        zi = self.zi
        while True:
            c = sq_pop()
            if c is None:
                return None
            x, i = c
            if owner[x] == NO_OWNER:
                lst = zi.get(x)
                if lst is not None and i in lst:
                    return c

    def apply_policy(self, x: int, i: int, policy: GrowthPolicy, boundary: int) -> int:
        """Grow a popped couple under the given policy; returns the region grown.

        Contested pixels (in two or more zones) go to ``boundary`` under
        INVARIANT_BOUNDARY, and under WATERSHED_BOUNDARY only when ``i`` is
        the smallest contender.
        """
        if policy is not GrowthPolicy.PLAIN:
            lst = self.zi.get(x)
            if lst is not None and len(lst) >= 2:
                if policy is GrowthPolicy.INVARIANT_BOUNDARY or i == min(lst):
                    self.grow(x, boundary)
                    return boundary
        self.grow(x, i)
        return i

    # -- inspection helpers ---------------------------------------------------

    def owner_of(self, coord) -> Optional[int]:
        o = self.owner[self.geo.index(coord)]
        return None if o == NO_OWNER else o

    def zones_of(self, coord) -> frozenset:
        return frozenset(self.zi.get(self.geo.index(coord), ()))
