"""Command-line front end: one subcommand per algorithm, plus a scaling bench.

Outputs are deterministic for fixed inputs and flags; set POPGROW_NO_TIMING=1
to zero the wall-time fields so runs can be compared byte for byte.
"""

from __future__ import annotations

import argparse
import gc
import os
import random
import sys
import time
from typing import Optional, Sequence

from . import algorithms as alg
from .algorithms import BOUNDARY, UNASSIGNED, UNREACHED, DistanceMap, LabelMap
from .engine import EngineError
from .grid import (
    MAX_VALUE,
    FormatError,
    GridImage,
    Neighborhood,
    connectivity_neighborhood,
    load_image,
    parse_seeds,
    save_image,
)

# ---------------------------------------------------------------------------
# label and distance encodings (fixed, documented mappings for golden files)


def encode_labels(labels: LabelMap) -> GridImage:
    """0 = unassigned, 1 = boundary, region r -> r+2."""
    top = max(labels.region_labels(), default=-1) + 2
    if top > MAX_VALUE:
        raise ValueError(f"too many regions to encode: label {top - 2}")
    return GridImage(labels.dims, [0 if v == UNASSIGNED else 1 if v == BOUNDARY else v + 2
                                   for v in labels.labels])


def decode_labels(img: GridImage) -> LabelMap:
    """Inverse of :func:`encode_labels`."""
    return LabelMap(img.dims, [UNASSIGNED if v == 0 else BOUNDARY if v == 1 else v - 2
                               for v in img.values])


def encode_distances(dm: DistanceMap) -> GridImage:
    """Distances 0..maxval-1, unreached pixels stored as maxval."""
    top = max((v for v in dm.values if v != UNREACHED), default=0)
    maxval = 255 if top < 255 else MAX_VALUE
    if top >= maxval:
        raise ValueError(f"max distance {top} does not fit below maxval {maxval}")
    return GridImage(dm.dims, [maxval if v == UNREACHED else v for v in dm.values])


def decode_distances(img: GridImage) -> DistanceMap:
    """Inverse of :func:`encode_distances` for a known maxval encoding."""
    maxval = 255 if max(img.values) <= 255 else MAX_VALUE
    return DistanceMap(img.dims, [UNREACHED if v == maxval else v for v in img.values])


# ---------------------------------------------------------------------------
# deterministic seeding


def _coord_from_linear(dims, k: int) -> tuple:
    out = []
    for e in dims:
        out.append(k % e)
        k //= e
    return tuple(out)


def random_seeds(dims, count: int, rng_seed: int, domain: Optional[GridImage] = None) -> list:
    """``count`` distinct random single-pixel seeds, labelled 0..count-1.

    Sampling is uniform without replacement over the grid (or over the
    nonzero ``domain`` when given) and fully determined by ``rng_seed``.
    """
    if domain is not None:
        pool: Sequence[int] = [k for k, v in enumerate(domain.values) if v]
    else:
        n = 1
        for e in dims:
            n *= e
        pool = range(n)
    if count > len(pool):
        raise ValueError(f"cannot place {count} seeds on {len(pool)} candidate pixels")
    rng = random.Random(rng_seed)
    picks = rng.sample(pool, count)
    return [(label, {_coord_from_linear(dims, k)}) for label, k in enumerate(picks)]


# ---------------------------------------------------------------------------
# benchmark


def _no_timing() -> bool:
    return os.environ.get("POPGROW_NO_TIMING") == "1"


def _timed(fn):
    """Run fn() with the cycle collector paused; returns (result, seconds)."""
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        t0 = time.perf_counter()
        result = fn()
        elapsed = time.perf_counter() - t0
    finally:
        if was_enabled:
            gc.enable()
    return result, elapsed


def bench(sizes: Sequence[int], algorithm: str, rng_seed: int) -> str:
    """Median-of-3 wall times for square grids of the given side lengths.

    Returns CSV rows of (n_pixels, ms).  Input generation is excluded from
    the timings.
    """
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    if algorithm not in ("distance", "watershed"):
        raise ValueError(f"bench supports distance and watershed, not {algorithm!r}")
    lines = ["n_pixels,ms"]
    zero = _no_timing()
    for side in sizes:
        dims = (side, side)
        case_seed = rng_seed * 1000003 + side
        seeds = [pixels for _, pixels in random_seeds(dims, 8, case_seed)]
        if algorithm == "watershed":
            rng = random.Random(case_seed + 1)
            f = GridImage(dims, [rng.randrange(256) for _ in range(side * side)])
            run = lambda: alg.watershed(f, seeds, connectivity_neighborhood(4))
        else:
            run = lambda: alg.distance(dims, seeds, connectivity_neighborhood(4))
        times = []
        for _ in range(3):
            _, elapsed = _timed(run)
            times.append(elapsed)
        median = sorted(times)[1]
        lines.append(f"{side * side},{0.0 if zero else median * 1000.0:.3f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="popgrow",
        description="Seeded region growing: influence zones, components, minima, "
                    "distances, watershed and reconstruction filters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, seeds=False, restrict=False):
        sp.add_argument("--input", required=True, help="input image (PGM or P3D)")
        if seeds:
            group = sp.add_mutually_exclusive_group(required=True)
            group.add_argument("--seeds", help="seed file: one '<label> <x> <y> [<z>]' per line")
            group.add_argument("--random-seeds", type=int, metavar="N",
                               help="place N uniform random single-pixel seeds")
            sp.add_argument("--rng-seed", type=int, default=0, metavar="K",
                            help="seed for --random-seeds (default 0)")
        if restrict:
            sp.add_argument("--restrict", help="binary image; growth stays on its nonzero domain")
        sp.add_argument("--neighborhood", type=int, choices=(4, 8, 6, 26), default=None,
                        help="connectivity (default: 4 for 2D, 6 for 3D)")
        sp.add_argument("--output", required=True, help="output image path")
        sp.add_argument("--report", help="also write the run report line to this file")

    common(sub.add_parser("voronoi", help="influence zones of the seeds"), seeds=True, restrict=True)
    common(sub.add_parser("clusters", help="connected components of a binary image"))
    common(sub.add_parser("minima", help="regional minima of a grey image"))
    common(sub.add_parser("distance", help="geodesic distance to the seeds"), seeds=True, restrict=True)
    common(sub.add_parser("watershed", help="watershed basins from labelled seeds"), seeds=True, restrict=True)
    sp = sub.add_parser("reconstruct", help="erosion-reconstruction of --marker over --input")
    common(sp)
    sp.add_argument("--marker", required=True, help="upper image eroded toward --input")
    sp = sub.add_parser("dynamic-filter", help="fill valleys shallower than --h")
    common(sp)
    sp.add_argument("--h", type=int, required=True, help="valley depth to fill")
    common(sub.add_parser("marker-reconstruct", help="suppress all minima except the seeds"),
           seeds=True)
    sp = sub.add_parser("bench", help="scaling benchmark (CSV of n_pixels, ms)")
    sp.add_argument("--algorithm", choices=("distance", "watershed"), required=True)
    sp.add_argument("--sizes", default="256,512,1024",
                    help="comma-separated square side lengths (default 256,512,1024)")
    sp.add_argument("--rng-seed", type=int, default=0, metavar="K")
    sp.add_argument("--output", required=True, help="CSV output path")
    sp.add_argument("--report", help="also write the run report line to this file")
    return parser


def _neighborhood_for(args, dims) -> Neighborhood:
    kind = args.neighborhood
    if kind is None:
        kind = 4 if len(dims) == 2 else 6
    v = connectivity_neighborhood(kind)
    if v.ndim != len(dims):
        raise ValueError(f"--neighborhood {kind} is {v.ndim}D but the input has {len(dims)} axes")
    return v


def _load_restrict(args) -> Optional[GridImage]:
    if getattr(args, "restrict", None):
        return load_image(args.restrict)
    return None


def _get_seed_groups(args, dims, restrict) -> list:
    if args.seeds:
        return [pixels for _, pixels in parse_seeds(args.seeds, dims)]
    return [pixels for _, pixels in random_seeds(dims, args.random_seeds, args.rng_seed,
                                                 domain=restrict)]


def _dims_str(dims) -> str:
    if not dims:
        return "-"
    return "x".join(str(e) for e in dims)


def _report(args, subcommand, dims, regions, boundary_pixels, seconds) -> str:
    ms = 0 if _no_timing() else int(round(seconds * 1000))
    line = (f"subcommand={subcommand} dims={_dims_str(dims)} regions={regions} "
            f"boundary_pixels={boundary_pixels} ms={ms} output={args.output}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(line + "\n")
    return line


def _labelmap_command(args, produce, dims) -> str:
    labels, seconds = _timed(produce)
    save_image(encode_labels(labels), args.output)
    return _report(args, args.command, dims, len(labels.region_labels()),
                   labels.boundary_count(), seconds)


def _cmd_voronoi(args) -> str:
    img = load_image(args.input)
    restrict = _load_restrict(args)
    v = _neighborhood_for(args, img.dims)
    seeds = _get_seed_groups(args, img.dims, restrict)
    return _labelmap_command(args, lambda: alg.voronoi(img.dims, seeds, v, restrict), img.dims)


def _cmd_clusters(args) -> str:
    img = load_image(args.input)
    v = _neighborhood_for(args, img.dims)
    return _labelmap_command(args, lambda: alg.domain_to_clusters(img, v), img.dims)


def _cmd_minima(args) -> str:
    img = load_image(args.input)
    v = _neighborhood_for(args, img.dims)
    result, seconds = _timed(lambda: alg.regional_minima(img, v))
    remap = {old: new for new, old in enumerate(sorted(result.minima))}
    flagged_only = LabelMap(img.dims, [remap.get(lab, UNASSIGNED) for lab in result.labels.labels])
    save_image(encode_labels(flagged_only), args.output)
    return _report(args, args.command, img.dims, len(remap), 0, seconds)


def _cmd_distance(args) -> str:
    img = load_image(args.input)
    restrict = _load_restrict(args)
    v = _neighborhood_for(args, img.dims)
    seeds = _get_seed_groups(args, img.dims, restrict)
    dm, seconds = _timed(lambda: alg.distance(img.dims, seeds, v, restrict))
    save_image(encode_distances(dm), args.output)
    return _report(args, args.command, img.dims, len(seeds), 0, seconds)


def _cmd_watershed(args) -> str:
    img = load_image(args.input)
    restrict = _load_restrict(args)
    v = _neighborhood_for(args, img.dims)
    seeds = _get_seed_groups(args, img.dims, restrict)
    return _labelmap_command(args, lambda: alg.watershed(img, seeds, v, restrict), img.dims)


def _grey_output_command(args, produce, dims) -> str:
    out, seconds = _timed(produce)
    save_image(out, args.output)
    return _report(args, args.command, dims, 0, 0, seconds)


def _cmd_reconstruct(args) -> str:
    g = load_image(args.input)
    f = load_image(args.marker)
    v = _neighborhood_for(args, g.dims)
    return _grey_output_command(args, lambda: alg.geodesic_reconstruction(f, g, v), g.dims)


def _cmd_dynamic_filter(args) -> str:
    g = load_image(args.input)
    v = _neighborhood_for(args, g.dims)
    return _grey_output_command(args, lambda: alg.dynamic_filter(g, args.h, v), g.dims)


def _cmd_marker_reconstruct(args) -> str:
    g = load_image(args.input)
    v = _neighborhood_for(args, g.dims)
    seeds = _get_seed_groups(args, g.dims, None)
    return _grey_output_command(args, lambda: alg.marker_reconstruction(g, seeds, v), g.dims)


def _cmd_bench(args) -> str:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise ValueError(f"--sizes must be comma-separated integers, got {args.sizes!r}") from None
    csv, seconds = _timed(lambda: bench(sizes, args.algorithm, args.rng_seed))
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(csv)
    return _report(args, args.command, (), 0, 0, seconds)


_COMMANDS = {
    "voronoi": _cmd_voronoi,
    "clusters": _cmd_clusters,
    "minima": _cmd_minima,
    "distance": _cmd_distance,
    "watershed": _cmd_watershed,
    "reconstruct": _cmd_reconstruct,
    "dynamic-filter": _cmd_dynamic_filter,
    "marker-reconstruct": _cmd_marker_reconstruct,
    "bench": _cmd_bench,
}


def run(argv=None) -> int:
    """Execute one subcommand; returns 0, or 2 on usage errors, 1 on data errors."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else int(exc.code)
    try:
        line = _COMMANDS[args.command](args)
    except (FormatError, EngineError, ValueError, OSError) as exc:
        print(f"popgrow: {exc}", file=sys.stderr)
        return 1
    print(line)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
