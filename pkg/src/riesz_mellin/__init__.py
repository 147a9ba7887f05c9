"""Riesz potential with kernel |x-y|^(-1/2) on polygon boundaries, its Mellin
corner symbols and the fractional Sobolev norms used to measure it."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import *  # noqa: F401,F403
from .geometry import PolygonBoundary, build_boundary, build_cover, corner_frames, boundary_distance
from .kernel import kernel_eval, series_coefficients, pole_decomposition
from .mellin import (LogGrid, GridFunction, Tail, VerticalLine, MellinSamples, mellin_forward,
                     mellin_inverse, weighted_norm, parseval_residual, hardy_sup_diagnostic, choose_line)
from .symbol import (MellinSymbol, symbol_direct, symbol_extended, residue_at, decay_profile,
                     continuity_moduli)
from .sobolev import (slobodeckii_seminorm, tilde_half_norm, mellin_half_seminorm, gram_matrices,
                      continuity_modulus_estimate)
from .riesz import (theta_map, corner_form_direct, corner_identity_check, apply_corner_difference,
                    assemble_riesz, localized_form, corner_continuity_ratio)
