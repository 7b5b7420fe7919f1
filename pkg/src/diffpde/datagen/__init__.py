"""Reference numerical solvers and random-field samplers for dataset
generation."""

from .grf import GrfSpec, sample_grf
from .darcy import DarcySolverConfig, SolverError, make_darcy_coefficient, solve_darcy
from .navier_stokes import CflError, NsSolverConfig, solve_ns_vorticity
from .datasets import (
    Dataset,
    build_darcy_dataset,
    build_ns_dataset,
    dataset_from_container,
    dataset_to_container,
    resample_plan,
)

__all__ = [
    "GrfSpec",
    "sample_grf",
    "DarcySolverConfig",
    "SolverError",
    "make_darcy_coefficient",
    "solve_darcy",
    "CflError",
    "NsSolverConfig",
    "solve_ns_vorticity",
    "Dataset",
    "build_darcy_dataset",
    "build_ns_dataset",
    "dataset_from_container",
    "dataset_to_container",
    "resample_plan",
]
