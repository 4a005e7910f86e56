"""Entanglement entropy of collectively coupled harmonic chains.

The structured path computes the block entropy from ``n_x x n_x`` matrices
only; :mod:`harmchains.oracle` is the dense reference for small lattices.
"""

__version__ = "0.1.0"

from .analysis import (SweepTable, bounds_residual, lidskii_check, saturation_curve, scaling_fit,
                       sweep, szego_consequence_check, szego_trace_curve)
from .correlations import BlockPair, GroundState, extract_block, ground_state_correlations, materialize
from .entropy import block_entropy, block_spectrum, entanglement_entropy, entropy_function
from .model import (REFERENCE_MODEL, BlockSpec, ChainCouplings, Geometry, Placement, spectrum_gap,
                    validate)
from .spectral import (SpectralFunction, ToeplitzCoeffs, build_toeplitz, eval_spectral, szego_logdet,
                       trace_ratio_constant)

__all__ = [
    "BlockPair", "BlockSpec", "ChainCouplings", "Geometry", "GroundState", "Placement",
    "REFERENCE_MODEL", "SpectralFunction", "SweepTable", "ToeplitzCoeffs", "block_entropy",
    "block_spectrum", "bounds_residual", "build_toeplitz", "entanglement_entropy", "entropy_function",
    "eval_spectral", "extract_block", "ground_state_correlations", "lidskii_check", "materialize",
    "saturation_curve", "scaling_fit", "spectrum_gap", "sweep", "szego_consequence_check",
    "szego_logdet", "szego_trace_curve", "trace_ratio_constant", "validate",
]
