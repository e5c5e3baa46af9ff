"""Geometrically nonlinear planar frame oracle for the closed-form model."""

from .compare import CurveComparison, compare_curves
from .model import (BeamElement, FrameModel, build_multibeam_assembly,
                    build_vbeam_mesh, with_material)
from .solver import (EquilibriumPath, PathStep, solve_guided_sweep,
                     solve_multibeam_assembly, solve_vbeam_sweep,
                     sweep_to_curve, write_path_csv)

__all__ = [
    "BeamElement", "FrameModel", "build_vbeam_mesh", "build_multibeam_assembly",
    "with_material", "EquilibriumPath", "PathStep", "solve_guided_sweep",
    "solve_multibeam_assembly", "solve_vbeam_sweep", "sweep_to_curve",
    "write_path_csv", "CurveComparison", "compare_curves",
]
