"""Ant colony solvers for the symmetric EUC_2D TSP: Elitist, MMAS, Beam-ACO and greedy Beam-ACO."""

from .instance import DistanceMatrix, Point, Tour, TspInstance, build_distance_matrix, euc2d_distance, random_instance, tour_length
from .pheromone import AcoParams, PheromoneMatrix
from .solvers import (
    AllOf,
    FirstOf,
    MaxIterations,
    SolverResult,
    WallClock,
    equivalent_beam_width,
    run_beam_aco,
    run_elitist,
    run_gbeam_aco,
    run_mmas,
    solve,
)
from .tsplib import parse_tsplib, read_tsplib, write_tsplib

__version__ = "0.1.0"

__all__ = [
    "AcoParams",
    "AllOf",
    "DistanceMatrix",
    "FirstOf",
    "MaxIterations",
    "PheromoneMatrix",
    "Point",
    "SolverResult",
    "Tour",
    "TspInstance",
    "WallClock",
    "build_distance_matrix",
    "equivalent_beam_width",
    "euc2d_distance",
    "parse_tsplib",
    "random_instance",
    "read_tsplib",
    "run_beam_aco",
    "run_elitist",
    "run_gbeam_aco",
    "run_mmas",
    "solve",
    "tour_length",
    "write_tsplib",
]
