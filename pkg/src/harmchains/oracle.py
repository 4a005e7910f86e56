"""
Dense reference computation.

Builds the full ``N x N`` coupling ``V = Z^2 / n_y``, takes its square root
and inverse square root by full eigendecomposition and computes entropies
for arbitrary index subsets with a general (non-symmetric) eigensolver.
Nothing here reuses the structured path, so it serves as the ground truth
in tests. Only intended for small lattices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .entropy import entropy_function
from .errors import ComplexEigenvalue, IndexOutOfRange, NonPositiveSpectrum, SizeCapExceeded
from .model import BlockSpec, ChainCouplings, Geometry
from .spectral import build_toeplitz

DEFAULT_SIZE_CAP = 4096


def build_z(couplings: ChainCouplings, geometry: Geometry) -> np.ndarray:
    """``Z`` with ``Lambda`` on the diagonal blocks and ``Q`` everywhere else."""
    lam = build_toeplitz(couplings.lam, geometry.n_x)
    q = build_toeplitz(couplings.q, geometry.n_x)
    n_y = geometry.n_y
    off = np.ones((n_y, n_y)) - np.eye(n_y)
    return np.kron(np.eye(n_y), lam) + np.kron(off, q)


@dataclass(frozen=True, eq=False)
class DenseCorrelations:
    vhalf: np.ndarray
    vinvhalf: np.ndarray
    geometry: Geometry
    frequencies: np.ndarray


def dense_ground_state(couplings: ChainCouplings, geometry: Geometry,
                       cap: int = DEFAULT_SIZE_CAP) -> DenseCorrelations:
    n = geometry.size
    if n > cap:
        raise SizeCapExceeded(f"N={n} exceeds oracle cap {cap}")
    z = build_z(couplings, geometry)
    v = z @ z / geometry.n_y
    w, u = np.linalg.eigh(v)
    if w[0] <= 0:
        raise NonPositiveSpectrum(f"V has non-positive eigenvalue {w[0]!r}")
    root = np.sqrt(w)
    vhalf = (u * root) @ u.T
    vinvhalf = (u / root) @ u.T
    return DenseCorrelations(0.5 * (vhalf + vhalf.T), 0.5 * (vinvhalf + vinvhalf.T), geometry, root)


def _check_indices(dc: DenseCorrelations, indices) -> np.ndarray:
    idx = np.asarray(list(indices), dtype=int)
    n = dc.geometry.size
    if idx.size == 0:
        raise IndexOutOfRange("index subset is empty")
    if idx.min() < 0 or idx.max() >= n:
        raise IndexOutOfRange(f"indices must lie in 0..{n - 1}")
    if np.unique(idx).size != idx.size:
        raise IndexOutOfRange("indices must be distinct")
    return idx


def dense_block_eigenvalues(dc: DenseCorrelations, indices: Iterable[int]) -> np.ndarray:
    """Sorted eigenvalues of ``A @ D`` for the rows/columns ``indices``."""
    idx = _check_indices(dc, indices)
    sub = np.ix_(idx, idx)
    mu = np.linalg.eigvals(dc.vinvhalf[sub] @ dc.vhalf[sub])
    if np.abs(mu.imag).max() > 1e-8 * max(1.0, np.abs(mu).max()):
        raise ComplexEigenvalue(f"A·D has complex eigenvalues (max imag {np.abs(mu.imag).max():.3g})")
    return np.sort(mu.real)


def dense_entropy(dc: DenseCorrelations, indices: Iterable[int]) -> float:
    mu = dense_block_eigenvalues(dc, indices)
    return float(np.sum(entropy_function(np.sqrt(mu))))


def dense_entropies(dc: DenseCorrelations, subsets: Sequence[Iterable[int]]) -> np.ndarray:
    """:func:`dense_entropy` for many subsets, batching equal-size ones."""
    subsets = [_check_indices(dc, s) for s in subsets]
    out = np.empty(len(subsets))
    by_size = {}
    for i, idx in enumerate(subsets):
        by_size.setdefault(idx.size, []).append(i)
    for members in by_size.values():
        idx = np.stack([subsets[i] for i in members])
        rows, cols = idx[:, :, None], idx[:, None, :]
        mu = np.linalg.eigvals(dc.vinvhalf[rows, cols] @ dc.vhalf[rows, cols])
        if np.abs(mu.imag).max() > 1e-8 * max(1.0, np.abs(mu).max()):
            raise ComplexEigenvalue("A·D has complex eigenvalues")
        out[members] = entropy_function(np.sqrt(mu.real)).sum(axis=1)
    return out


def block_indices(geometry: Geometry, block: BlockSpec, chains: Optional[Sequence[int]] = None,
                  x_start: Optional[int] = None) -> np.ndarray:
    """Flat indices ``y * n_x + x`` of a rectangular block.

    ``chains`` defaults to the first ``l_y`` chains; ``x_start`` defaults to
    the block's placement.
    """
    if x_start is None:
        xs = np.arange(geometry.n_x)[block.x_window(geometry)]
    else:
        xs = np.arange(x_start, x_start + block.l_x)
    ys = np.arange(block.l_y) if chains is None else np.asarray(chains)
    return (ys[:, None] * geometry.n_x + xs[None, :]).ravel()


@dataclass(frozen=True)
class EquivalenceRecord:
    l_x: int
    l_y: int
    x_start: int
    y_start: int
    entropy_error: float
    spectrum_error: float
    min_mu: float
    clamp_count: int
    n_eigenvalues: int


def equivalence_suite(couplings: ChainCouplings, geometry: Geometry, mode: str = "strict",
                      all_positions: bool = True) -> list[EquivalenceRecord]:
    """Structured-vs-dense comparison over every rectangular block.

    With ``all_positions`` every x-offset and every contiguous y-offset is
    visited; otherwise only corner blocks.
    """
    from .correlations import extract_block, ground_state_correlations
    from .entropy import block_spectrum, entanglement_entropy
    from .model import Placement

    dense = dense_ground_state(couplings, geometry)
    state = ground_state_correlations(couplings, geometry, mode)
    records = []
    for lx in range(1, geometry.n_x + 1):
        x_starts = range(geometry.n_x - lx + 1) if all_positions else [0]
        for x0 in x_starts:
            for ly in range(1, geometry.n_y + 1):
                sp = block_spectrum(extract_block(state, BlockSpec(lx, ly, Placement("offset", x0))))
                structured = entanglement_entropy(sp)
                y_starts = range(geometry.n_y - ly + 1) if all_positions else [0]
                for y0 in y_starts:
                    idx = block_indices(geometry, BlockSpec(lx, ly), chains=range(y0, y0 + ly), x_start=x0)
                    mu = dense_block_eigenvalues(dense, idx)
                    s_dense = float(np.sum(entropy_function(np.sqrt(mu))))
                    records.append(EquivalenceRecord(
                        lx, ly, x0, y0,
                        entropy_error=abs(structured.S - s_dense),
                        spectrum_error=float(np.abs(sp.multiset() - mu).max()),
                        min_mu=sp.raw_minimum,
                        clamp_count=sp.clamp_count,
                        n_eigenvalues=lx * ly,
                    ))
    return records
