"""Sparsity-based audio declipping with the SPADE family of algorithms."""

from .clipping import ClipMask, InconsistentClippingError, clip, detect_mask, project_gamma
from .frames import (
    CountingFrame, DFTFrame, DimensionError, FrameSpec, SymmetryError, TimeSignal,
    analysis, overlap_add, segment, synthesis,
)
from .kernels import BACKEND
from .metrics import delta_sdr, sdr
from .pipeline import DeclipReport, declip, declip_fixed_iterations, declip_iteration_grid
from .solvers import (
    BlockResult, SpadeConfig, Termination, Variant, a_spade_block, hard_threshold,
    relaxation_schedule, s_spade_original_block, s_spade_proposed_block, solve_block,
)

__version__ = "0.1.0"
