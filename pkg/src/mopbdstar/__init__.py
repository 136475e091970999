"""Incremental multi-objective path planning on dynamic grid graphs."""

from .costvec import INF, dominates, eps_dominates, nd_filter, weakly_dominates
from .graph import DynGraph, GridMap, assign_random_costs, bundled_map, read_map
from .modstar import MODStar
from .mopbd import MOPBDStar, PlannerConfig
from .namoa import NAMOAStar
from .simulator import SimConfig, Simulation, run_batch, run_instance

__all__ = [
    "INF",
    "DynGraph",
    "GridMap",
    "MODStar",
    "MOPBDStar",
    "NAMOAStar",
    "PlannerConfig",
    "SimConfig",
    "Simulation",
    "assign_random_costs",
    "bundled_map",
    "dominates",
    "eps_dominates",
    "nd_filter",
    "read_map",
    "run_batch",
    "run_instance",
    "weakly_dominates",
]
