"""Seeded region growing by pixel aggregation.

A small engine (regions, zones of influence, a bank of FIFO queues and
pluggable growth policies) plus the classical morphological algorithms built
on it: Voronoi-style influence zones, connected components, regional minima,
geodesic distance, watershed, and geodesic reconstruction filters.
"""

from .algorithms import (
    BOUNDARY,
    UNASSIGNED,
    UNREACHED,
    DistanceMap,
    LabelMap,
    MinimaResult,
    distance,
    domain_to_clusters,
    dynamic_filter,
    fill_holes,
    geodesic_reconstruction,
    marker_reconstruction,
    max_cluster,
    regional_minima,
    remove_border_components,
    voronoi,
    watershed,
)
from .engine import (
    ALL_REGIONS,
    OUT,
    SELF_ONLY,
    EngineError,
    Geometry,
    GrowthPolicy,
    Population,
    SystemQueue,
    Tribe,
)
from .grid import (
    MAX_VALUE,
    FormatError,
    GridImage,
    N4,
    N6,
    N8,
    N26,
    Neighborhood,
    add_saturating,
    complement,
    connectivity_neighborhood,
    dual_neighborhood,
    lattice_neighborhood,
    load_image,
    neighbors,
    parse_seeds,
    save_image,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_REGIONS",
    "BOUNDARY",
    "DistanceMap",
    "EngineError",
    "FormatError",
    "Geometry",
    "GridImage",
    "GrowthPolicy",
    "LabelMap",
    "MAX_VALUE",
    "MinimaResult",
    "N26",
    "N4",
    "N6",
    "N8",
    "Neighborhood",
    "OUT",
    "Population",
    "SELF_ONLY",
    "SystemQueue",
    "Tribe",
    "UNASSIGNED",
    "UNREACHED",
    "add_saturating",
    "complement",
    "connectivity_neighborhood",
    "distance",
    "domain_to_clusters",
    "dual_neighborhood",
    "dynamic_filter",
    "fill_holes",
    "geodesic_reconstruction",
    "lattice_neighborhood",
    "load_image",
    "marker_reconstruction",
    "max_cluster",
    "neighbors",
    "parse_seeds",
    "regional_minima",
    "remove_border_components",
    "save_image",
    "voronoi",
    "watershed",
]
