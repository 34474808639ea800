"""polyreg: polyhedral convex regularization for inverse problems.

Exact polyhedral-norm evaluation (synthesis/analysis/zonotope forms),
Parseval filterbank frames, proximal solvers, and denoising/MRI-style
reconstruction experiments with a command-line front end.
"""

from .exceptions import (
    DimensionError, DivergenceError, FrameError, NotANormError, ParseError,
    PolyregError, PotentialError, RankError,
)
from .geometry import (
    FacetMatrix, NormEquivalenceReport, RegularizationOperator,
    VertexDictionary, analysis_norm, approximate_ball, canonicalize_signs,
    extreme_points, facets_from_vertices, fit_weighted_l1_to_linf,
    l1_linf_witness, measure_equivalence, sphere_directions, synthesis_norm,
    weighted_l1_norm, zonotope_gauge,
)
from .models import (
    ForwardModel, SamplingMask, add_noise, apply_H, apply_Ht, identity_model,
    make_mask, make_phantom, masked_dft_model, psnr, tv_denoise,
)
from .operators import (
    FRAME_PRESETS, SeparablePotential, TightFrame, build_parseval_frame,
    dct_frame, frame_analyze, frame_synthesize, haar_frame, identity_frame,
    orthogonalize, potential_grad, potential_prox, project_l1_ball, prox_linf,
    range_projection, soft_threshold,
)
from .solvers import (
    Problem, SolveReport, apgd_solve, check_optimality, drs_solve,
    fista_restricted_synthesis, fista_synthesis, objective_value,
    operator_norm, pdhg_analysis_l1, pdhg_l1_operator, pdhg_linf,
)

__version__ = "0.1.0"

__all__ = [
    "DimensionError", "DivergenceError", "FrameError", "NotANormError",
    "ParseError", "PolyregError", "PotentialError", "RankError",
    "FacetMatrix", "NormEquivalenceReport", "RegularizationOperator",
    "VertexDictionary", "analysis_norm", "approximate_ball",
    "canonicalize_signs", "extreme_points", "facets_from_vertices",
    "fit_weighted_l1_to_linf", "l1_linf_witness", "measure_equivalence",
    "sphere_directions", "synthesis_norm", "weighted_l1_norm",
    "zonotope_gauge",
    "ForwardModel", "SamplingMask", "add_noise", "apply_H", "apply_Ht",
    "identity_model", "make_mask", "make_phantom", "masked_dft_model",
    "psnr", "tv_denoise",
    "FRAME_PRESETS", "SeparablePotential", "TightFrame",
    "build_parseval_frame", "dct_frame", "frame_analyze", "frame_synthesize",
    "haar_frame", "identity_frame", "orthogonalize", "potential_grad",
    "potential_prox", "project_l1_ball", "prox_linf", "range_projection",
    "soft_threshold",
    "Problem", "SolveReport", "apgd_solve", "check_optimality", "drs_solve",
    "fista_restricted_synthesis", "fista_synthesis", "objective_value",
    "operator_norm", "pdhg_analysis_l1", "pdhg_l1_operator", "pdhg_linf",
    "__version__",
]
