"""Dense integer grids, lattice neighborhoods and the file formats around them.

A grid image is a flat vector of integers in 0..65535 over a 1- to 3-axis box,
with the first axis varying fastest.  2D images are read and written as netpbm
PGM (P2 ascii, P5 binary); 3D volumes use a one-line headered binary format.
Seed files are plain text with one labelled coordinate per line.
"""

from __future__ import annotations

import itertools
import sys
from array import array
from typing import Iterable, Sequence

Coordinate = tuple  # one int per axis
Extents = tuple     # grid size per axis

MAX_VALUE = 65535

_WHITESPACE = b" \t\n\r\x0b\x0c"


class FormatError(ValueError):
    """A malformed image or seed file.  ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte {offset})"
        super().__init__(message)
        self.offset = offset


class GridImage:
    """Immutable n-dimensional scalar grid (1, 2 or 3 axes).

    ``values`` is stored flat with the first axis fastest:  index(x, y, z)
    = x + w*(y + h*z).  Values must lie in 0..65535.
    """

    __slots__ = ("dims", "values")

    def __init__(self, dims: Iterable[int], values: Iterable[int]):
        dims = tuple(int(e) for e in dims)
        if not 1 <= len(dims) <= 3:
            raise ValueError(f"GridImage needs 1 to 3 axes, got {len(dims)}")
        if any(e < 1 for e in dims):
            raise ValueError(f"every axis extent must be >= 1, got {dims}")
        values = tuple(values)
        n = 1
        for e in dims:
            n *= e
        if len(values) != n:
            raise ValueError(f"expected {n} values for dims {dims}, got {len(values)}")
        if min(values) < 0 or max(values) > MAX_VALUE:
            raise ValueError(f"values must lie in 0..{MAX_VALUE}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("GridImage is immutable")

    @property
    def size(self) -> int:
        return len(self.values)

    def index(self, coord: Coordinate) -> int:
        idx = 0
        stride = 1
        for c, e in zip(coord, self.dims):
            if not 0 <= c < e:
                raise IndexError(f"coordinate {coord} out of bounds for dims {self.dims}")
            idx += c * stride
            stride *= e
        return idx

    def get(self, coord: Coordinate) -> int:
        return self.values[self.index(coord)]

    def __eq__(self, other):
        return (
            isinstance(other, GridImage)
            and self.dims == other.dims
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.dims, self.values))

    def __repr__(self):
        return f"GridImage(dims={self.dims})"


class Neighborhood:
    """A symmetric set of nonzero lattice offsets (the structuring element).

    The origin is always excluded and the set must be closed under negation.
    """

    __slots__ = ("offsets", "name")

    def __init__(self, offsets: Iterable[Coordinate], name: str = "custom"):
        offs = tuple(tuple(int(c) for c in o) for o in offsets)
        if not offs:
            raise ValueError("a neighborhood needs at least one offset")
        ndim = len(offs[0])
        if any(len(o) != ndim for o in offs):
            raise ValueError("offsets must all have the same number of axes")
        if any(all(c == 0 for c in o) for o in offs):
            raise ValueError("the zero offset is excluded from neighborhoods")
        as_set = set(offs)
        if len(as_set) != len(offs):
            raise ValueError("duplicate offsets")
        for o in offs:
            if tuple(-c for c in o) not in as_set:
                raise ValueError(f"offset {o} has no negation: neighborhood must be symmetric")
        object.__setattr__(self, "offsets", offs)
        object.__setattr__(self, "name", name)

    def __setattr__(self, name, value):
        raise AttributeError("Neighborhood is immutable")

    @property
    def ndim(self) -> int:
        return len(self.offsets[0])

    def __repr__(self):
        return f"Neighborhood({self.name}, {len(self.offsets)} offsets)"


def lattice_neighborhood(ndim: int, norm) -> Neighborhood:
    """Unit-ball neighborhood for norm 1 (orthogonal moves) or 'inf' (all box moves)."""
    if norm == 1:
        offs = []
        for axis in range(ndim):
            plus = tuple(1 if a == axis else 0 for a in range(ndim))
            offs.append(plus)
            offs.append(tuple(-c for c in plus))
        count = 2 * ndim
    elif norm == "inf":
        offs = [o for o in itertools.product((-1, 0, 1), repeat=ndim) if any(o)]
        count = 3 ** ndim - 1
    else:
        raise ValueError("norm must be 1 or 'inf'")
    return Neighborhood(offs, name=f"{ndim}d{count}")


N4 = lattice_neighborhood(2, 1)
N8 = lattice_neighborhood(2, "inf")
N6 = lattice_neighborhood(3, 1)
N26 = lattice_neighborhood(3, "inf")

_BY_CONNECTIVITY = {4: N4, 8: N8, 6: N6, 26: N26}
_DUAL = {"2d4": N8, "2d8": N4, "3d6": N26, "3d26": N6}


def connectivity_neighborhood(kind: int) -> Neighborhood:
    """Predefined neighborhood by connectivity count: 4, 8 (2D) or 6, 26 (3D)."""
    try:
        return _BY_CONNECTIVITY[kind]
    except KeyError:
        raise ValueError(f"connectivity must be one of 4, 8, 6, 26, got {kind}") from None


def dual_neighborhood(v: Neighborhood) -> Neighborhood:
    """The complementary-connectivity pairing (4<->8 in 2D, 6<->26 in 3D)."""
    try:
        return _DUAL[v.name]
    except KeyError:
        raise ValueError(f"no dual defined for neighborhood {v.name!r}") from None


def neighbors(x: Coordinate, v: Neighborhood, dims: Extents) -> list:
    """In-bounds neighbors of ``x`` under ``v``, in offset-list order."""
    out = []
    for off in v.offsets:
        y = tuple(c + o for c, o in zip(x, off))
        ok = True
        for c, e in zip(y, dims):
            if c < 0 or c >= e:
                ok = False
                break
        if ok:
            out.append(y)
    return out


def add_saturating(g: GridImage, h: int) -> GridImage:
    """Per-pixel g(x)+h, clamped to the 16-bit ceiling."""
    if h < 0:
        raise ValueError("h must be >= 0")
    return GridImage(g.dims, tuple(min(v + h, MAX_VALUE) for v in g.values))


def complement(img: GridImage) -> GridImage:
    """Binary inversion: 1 where the image is 0, 0 where it is nonzero."""
    return GridImage(img.dims, tuple(0 if v else 1 for v in img.values))


# --------------------------------------------------------------------------
# file formats


def _tokens(data: bytes, start: int = 0):
    """Yield (token, byte offset) skipping whitespace and # comment lines."""
    i = start
    n = len(data)
    while i < n:
        c = data[i]
        if c in _WHITESPACE:
            i += 1
        elif c == 0x23:  # '#'
            while i < n and data[i] not in b"\r\n":
                i += 1
        else:
            j = i
            while j < n and data[j] not in _WHITESPACE:
                j += 1
            yield data[i:j], i
            i = j


def _int_token(tok: bytes, offset: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"expected integer {what}, got {tok!r}", offset) from None


def _next(toks, what: str, end: int) -> tuple:
    try:
        return next(toks)
    except StopIteration:
        raise FormatError(f"truncated file: missing {what}", end) from None


def load_image(path) -> GridImage:
    """Read a PGM (P2/P5) or P3D volume file."""
    with open(path, "rb") as fh:
        data = fh.read()
    toks = _tokens(data)
    magic, off = _next(toks, "magic number", 0)
    if magic == b"P2":
        return _load_p2(data, toks)
    if magic == b"P5":
        return _load_p5(data, toks)
    if magic == b"P3D":
        return _load_p3d(data, toks)
    raise FormatError(f"unknown magic {magic!r}", off)


def _header_dims(data, toks, names):
    vals = []
    for name in names:
        tok, off = _next(toks, name, len(data))
        v = _int_token(tok, off, name)
        if v < 1:
            raise FormatError(f"{name} must be >= 1, got {v}", off)
        vals.append(v)
    tok, off = _next(toks, "maxval", len(data))
    maxval = _int_token(tok, off, "maxval")
    if maxval > MAX_VALUE:
        raise FormatError(f"maxval {maxval} exceeds {MAX_VALUE}", off)
    if maxval < 1:
        raise FormatError(f"maxval must be >= 1, got {maxval}", off)
    return vals, maxval, off + len(tok)


def _load_p2(data: bytes, toks) -> GridImage:
    (w, h), maxval, _ = _header_dims(data, toks, ("width", "height"))
    values = []
    for k in range(w * h):
        tok, off = _next(toks, f"sample {k}", len(data))
        v = _int_token(tok, off, "sample")
        if not 0 <= v <= maxval:
            raise FormatError(f"sample {v} outside 0..{maxval}", off)
        values.append(v)
    for tok, off in toks:
        raise FormatError(f"trailing data {tok!r}", off)
    return GridImage((w, h), values)


def _load_p5(data: bytes, toks) -> GridImage:
    (w, h), maxval, header_end = _header_dims(data, toks, ("width", "height"))
    # exactly one whitespace byte separates the header from the raster
    raster = header_end + 1
    if raster > len(data) or data[header_end] not in _WHITESPACE:
        raise FormatError("missing raster separator after maxval", header_end)
    per = 1 if maxval <= 255 else 2
    need = w * h * per
    if len(data) - raster < need:
        raise FormatError("truncated raster", len(data))
    if len(data) - raster > need:
        raise FormatError("trailing data after raster", raster + need)
    payload = data[raster:raster + need]
    if per == 1:
        values = list(payload)
    else:
        arr = array("H")
        arr.frombytes(payload)
        if sys.byteorder == "little":
            arr.byteswap()  # P5 16-bit samples are big-endian
        values = arr.tolist()
    for k, v in enumerate(values):
        if v > maxval:
            raise FormatError(f"sample {v} outside 0..{maxval}", raster + k * per)
    return GridImage((w, h), values)


def _load_p3d(data: bytes, toks) -> GridImage:
    (w, h, d), maxval, header_end = _header_dims(data, toks, ("width", "height", "depth"))
    raster = header_end + 1
    if raster > len(data) or data[header_end] not in _WHITESPACE:
        raise FormatError("missing raster separator after maxval", header_end)
    need = w * h * d * 2
    if len(data) - raster < need:
        raise FormatError("truncated raster", len(data))
    if len(data) - raster > need:
        raise FormatError("trailing data after raster", raster + need)
    arr = array("H")
    arr.frombytes(data[raster:raster + need])
    if sys.byteorder == "big":
        arr.byteswap()  # P3D samples are little-endian
    values = arr.tolist()
    for k, v in enumerate(values):
        if v > maxval:
            raise FormatError(f"sample {v} outside 0..{maxval}", raster + k * 2)
    return GridImage((w, h, d), values)


def _canonical_maxval(img: GridImage) -> int:
    return 255 if max(img.values) <= 255 else MAX_VALUE


def save_image(img: GridImage, path, ascii_format: bool = False) -> None:
    """Write a 2D image as PGM (P5, or P2 when ``ascii_format``) or a 3D volume as P3D."""
    if len(img.dims) == 2:
        data = _dump_p2(img) if ascii_format else _dump_p5(img)
    elif len(img.dims) == 3:
        data = _dump_p3d(img)
    else:
        raise FormatError(f"no file format for {len(img.dims)}D images")
    with open(path, "wb") as fh:
        fh.write(data)


def _dump_p2(img: GridImage) -> bytes:
    w, h = img.dims
    lines = [f"P2\n{w} {h}\n{_canonical_maxval(img)}"]
    for y in range(h):
        row = img.values[y * w:(y + 1) * w]
        lines.append(" ".join(str(v) for v in row))
    return ("\n".join(lines) + "\n").encode("ascii")


def _dump_p5(img: GridImage) -> bytes:
    w, h = img.dims
    maxval = _canonical_maxval(img)
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    if maxval <= 255:
        return header + bytes(img.values)
    arr = array("H", img.values)
    if sys.byteorder == "little":
        arr.byteswap()
    return header + arr.tobytes()


def _dump_p3d(img: GridImage) -> bytes:
    w, h, d = img.dims
    header = f"P3D {w} {h} {d} {_canonical_maxval(img)}\n".encode("ascii")
    arr = array("H", img.values)
    if sys.byteorder == "big":
        arr.byteswap()
    return header + arr.tobytes()


def parse_seeds(path, dims: Extents | None = None) -> list:
    """Read labelled seed pixels:  one ``<label> <x> <y> [<z>]`` per line.

    Lines starting with ``#`` are comments.  Returns ``[(label, set of
    coordinates), ...]`` with labels renumbered densely 0..n-1 in ascending
    order of the original labels.  Seed sets are pairwise disjoint; when
    ``dims`` is given every coordinate is bounds-checked against it.
    """
    groups: dict = {}
    taken: dict = {}
    arity = len(dims) if dims is not None else None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) not in (3, 4):
                raise FormatError(f"line {lineno}: expected '<label> <x> <y> [<z>]', got {stripped!r}")
            try:
                nums = [int(f) for f in fields]
            except ValueError:
                raise FormatError(f"line {lineno}: non-integer field in {stripped!r}") from None
            label, coord = nums[0], tuple(nums[1:])
            if arity is None:
                arity = len(coord)
            elif len(coord) != arity:
                raise FormatError(f"line {lineno}: expected {arity} coordinate axes, got {len(coord)}")
            if dims is not None:
                for c, e in zip(coord, dims):
                    if not 0 <= c < e:
                        raise FormatError(f"line {lineno}: coordinate {coord} outside dims {tuple(dims)}")
            prev = taken.get(coord)
            if prev is not None and prev != label:
                raise FormatError(f"line {lineno}: coordinate {coord} already used by label {prev}")
            taken[coord] = label
            groups.setdefault(label, set()).add(coord)
    return [(new, groups[old]) for new, old in enumerate(sorted(groups))]
