"""Decoders and threshold Monte Carlo for the X-cube code.

The package simulates the three-dimensional X-cube stabilizer code on a
periodic cubic lattice and decodes both of its error sectors with
plane-parallelized minimum-weight matching: cell defects (lineons) with a
waypoint-aware corner penalty, vertex defects (fractons) with iteratively
reweighted Manhattan matchings.
"""

__version__ = "0.1.0"

from .lattice import Axis, CellId, Color, Coord3, FaceId, Lattice, PlaneId, VertexId
from .matching import Matching, WeightedGraph, brute_force_mwpm, mwpm
from .noise import NoiseSpec, sample
from .xcube import (LogicalOperator, PauliFrame, Syndrome, canonical_logicals,
                    extract_syndrome, logical_failure, move_defects,
                    stabilizer_cell, stabilizer_vertex)

__all__ = [
    "__version__",
    "Axis", "CellId", "Color", "Coord3", "FaceId", "Lattice", "PlaneId", "VertexId",
    "Matching", "WeightedGraph", "brute_force_mwpm", "mwpm",
    "NoiseSpec", "sample",
    "LogicalOperator", "PauliFrame", "Syndrome", "canonical_logicals",
    "extract_syndrome", "logical_failure", "move_defects",
    "stabilizer_cell", "stabilizer_vertex",
]
