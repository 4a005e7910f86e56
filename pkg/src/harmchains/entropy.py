"""
Entanglement entropy of a rectangular block from its structured blocks.

The ``l_x * l_y`` eigenvalues of ``A @ D`` split exactly into two sets.
On the ``l_y - 1`` chain combinations orthogonal to the uniform vector the
product acts as ``A0 @ D0``. On the uniform combination it acts as

    M_u = (A0 + (l_y/n_y)(A1 - A0)) @ (D0 + l_y D1)

which expands to ``A0 D0 + l_y A0 D1 + (l_y/n_y)(A1-A0) D0 + (l_y^2/n_y)(A1-A0) D1``.
Both are products of two positive definite matrices and are diagonalized
through a Cholesky congruence, so the spectra are real by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .correlations import BlockPair, GroundState, extract_block, ground_state_correlations
from .errors import ComplexEigenvalue, DomainError, NotPositiveDefinite
from .model import STRICT, BlockSpec, ChainCouplings, Geometry

SPECTRUM_TOL = 1e-9
SYMMETRY_TOL = 1e-10


def entropy_function(x, tol: float = SPECTRUM_TOL):
    """Entropy of one mode with symplectic eigenvalue ``x >= 1``.

    f(x) = (x+1)/2 ln((x+1)/2) - (x-1)/2 ln((x-1)/2), with f(1) = 0.
    Values in ``[1 - tol, 1)`` are treated as 1.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x >= 1.0 - tol)):
        raise DomainError(f"entropy_function needs x >= 1, got min {np.min(x)!r}")
    x = np.maximum(x, 1.0)
    plus = 0.5 * (x + 1.0)
    minus = 0.5 * (x - 1.0)
    # same as plus*ln(plus) - minus*ln(minus) without the cancellation at large x
    small = minus < 1e-15
    safe = np.where(small, 1.0, minus)
    out = np.log(plus) + np.where(small, 0.0, safe * np.log1p(1.0 / safe))
    return out if out.ndim else float(out)


def product_eigenvalues(a: np.ndarray, x: np.ndarray, return_error: bool = False):
    """Ascending eigenvalues of ``a @ x`` for positive definite ``a`` and symmetric ``x``.

    Uses ``a = L L^T`` and the similar symmetric matrix ``L^T x L``. With
    ``return_error`` also returns the backward-error bound of the symmetric
    eigensolver, ``8 n eps max|w|``.
    """
    try:
        chol = scipy.linalg.cholesky(a, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"A-factor is not positive definite: {exc}") from None
    sym = chol.T @ x @ chol
    scale = max(np.abs(sym).max(), 1.0)
    if np.abs(sym - sym.T).max() > SYMMETRY_TOL * scale:
        raise ComplexEigenvalue("congruence produced a non-symmetric matrix; spectrum may be complex")
    w = scipy.linalg.eigvalsh(0.5 * (sym + sym.T))
    if return_error:
        return w, 8.0 * w.size * np.finfo(float).eps * max(np.abs(w).max(), 1.0)
    return w


@dataclass(frozen=True, eq=False)
class BlockSpectrum:
    """Eigenvalues of ``A @ D`` grouped by sector.

    ``degenerate`` has multiplicity ``l_y - 1`` each, ``uniform`` once each.
    """

    degenerate: np.ndarray
    uniform: np.ndarray
    l_x: int
    l_y: int
    clamp_count: int = 0
    raw_minimum: float = float("nan")

    def multiset(self) -> np.ndarray:
        """All ``l_x * l_y`` eigenvalues, sorted ascending."""
        full = np.concatenate([np.repeat(self.degenerate, self.l_y - 1), self.uniform])
        return np.sort(full)

    @property
    def minimum(self) -> float:
        values = self.uniform if self.l_y == 1 else np.concatenate([self.degenerate, self.uniform])
        return float(values.min())


def _clamp(values: np.ndarray, tol: float, rounding: float) -> tuple[np.ndarray, int]:
    """Snap eigenvalues just below 1 up to 1.

    Values within the solver's rounding error of 1 are exact unit
    eigenvalues (uncoupled modes) and are not counted; values further down
    but within ``tol`` are counted as clamps.
    """
    if np.any(values < 1.0 - tol):
        raise DomainError(f"eigenvalue {values.min()!r} of A·D is below 1 - {tol:g}")
    low = values < 1.0
    counted = values < 1.0 - rounding
    return np.where(low, 1.0, values), int(counted.sum())


def block_spectrum(bp: BlockPair, tol: float = SPECTRUM_TOL) -> BlockSpectrum:
    """Exact spectrum of ``A @ D`` via the uniform/orthogonal chain split."""
    degenerate, err_deg = product_eigenvalues(bp.a0, bp.d0, return_error=True)
    a_uniform = bp.a0 + (bp.l_y / bp.n_y) * (bp.a1 - bp.a0)
    d_uniform = bp.d0 + bp.l_y * bp.d1
    uniform, err_uni = product_eigenvalues(a_uniform, d_uniform, return_error=True)
    raw_min = float(uniform[0] if bp.l_y == 1 else min(uniform[0], degenerate[0]))

    degenerate, n_deg = _clamp(degenerate, tol, err_deg)
    uniform, n_uni = _clamp(uniform, tol, err_uni)
    clamps = n_deg * (bp.l_y - 1) + n_uni
    return BlockSpectrum(degenerate, uniform, bp.l_x, bp.l_y, clamps, raw_min)


@dataclass(frozen=True, eq=False)
class EntropyResult:
    S: float
    S1: float
    S2: float
    spectrum: BlockSpectrum
    clamp_count: int


def entanglement_entropy(sp: BlockSpectrum) -> EntropyResult:
    """``S = S1 + S2`` in nats.

    ``S1`` collects the ``l_x (l_y - 1)`` degenerate eigenvalues and ``S2``
    the ``l_x`` uniform-sector eigenvalues.
    """
    s1 = (sp.l_y - 1) * float(np.sum(entropy_function(np.sqrt(sp.degenerate))))
    s2 = float(np.sum(entropy_function(np.sqrt(sp.uniform))))
    return EntropyResult(S=s1 + s2, S1=s1, S2=s2, spectrum=sp, clamp_count=sp.clamp_count)


def block_entropy(couplings: ChainCouplings, geometry: Geometry, block: BlockSpec,
                  mode: str = STRICT, state: GroundState | None = None) -> EntropyResult:
    """Entropy of ``block`` computed entirely on the structured path."""
    if state is None:
        state = ground_state_correlations(couplings, geometry, mode)
    return entanglement_entropy(block_spectrum(extract_block(state, block)))
