"""
Structured ground-state correlations.

Both ``V^{1/2}`` and ``V^{-1/2}`` have the form

    X0 (x) 1_{n_y} + X1 (x) J_{n_y} / n_y

with ``J`` the all-ones matrix, so the element coupling ``(x, y)`` and
``(x', y')`` is ``X0[x, x'] delta_{y y'} + X1[x, x'] / n_y``. Only the two
``n_x x n_x`` inverses ``(Lambda - Q)^{-1}`` and ``(Lambda - Q + n_y Q)^{-1}``
are ever formed; a block of ``l_y`` chains is again of this form with the
projector truncated to ``l_y`` rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np
import scipy.linalg

from .errors import BlockOutOfRange, SingularMatrix, SizeCapExceeded
from .model import STRICT, BlockSpec, ChainCouplings, Geometry, require_valid
from .spectral import ToeplitzCoeffs, build_toeplitz

DEFAULT_SIZE_CAP = 4096


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class StructuredCorrelation:
    x0: np.ndarray
    x1: np.ndarray
    n_y: int

    @property
    def n_x(self) -> int:
        return self.x0.shape[0]


@dataclass(frozen=True, eq=False)
class GroundState:
    """The ``n_x x n_x`` building blocks of the ground-state correlations.

    Iterating yields ``(vhalf, vinvhalf)``.
    """

    gap: np.ndarray            # Lambda - Q
    q: np.ndarray              # Q
    gap_inv: np.ndarray        # (Lambda - Q)^{-1}
    collective_inv: np.ndarray  # (Lambda - Q + n_y Q)^{-1}
    n_y: int

    @property
    def n_x(self) -> int:
        return self.gap.shape[0]

    @property
    def vhalf(self) -> StructuredCorrelation:
        root = math.sqrt(self.n_y)
        return StructuredCorrelation(_frozen(self.gap / root), _frozen(self.q * root), self.n_y)

    @property
    def vinvhalf(self) -> StructuredCorrelation:
        root = math.sqrt(self.n_y)
        return StructuredCorrelation(_frozen(self.gap_inv * root),
                                     _frozen((self.collective_inv - self.gap_inv) * root), self.n_y)

    def __iter__(self):
        yield self.vhalf
        yield self.vinvhalf


def spd_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric positive definite matrix via Cholesky."""
    try:
        factor = scipy.linalg.cho_factor(m, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"matrix is not positive definite: {exc}") from None
    inv = scipy.linalg.cho_solve(factor, np.eye(m.shape[0]))
    return 0.5 * (inv + inv.T)


@lru_cache(maxsize=32)
def _ground_state(gap: ToeplitzCoeffs, q: ToeplitzCoeffs, n_x: int, n_y: int) -> GroundState:
    gap_m = build_toeplitz(gap, n_x)
    q_m = build_toeplitz(q, n_x)
    return GroundState(
        gap=_frozen(gap_m),
        q=_frozen(q_m),
        gap_inv=_frozen(spd_inverse(gap_m)),
        collective_inv=_frozen(spd_inverse(gap_m + n_y * q_m)),
        n_y=n_y,
    )


def ground_state_correlations(couplings: ChainCouplings, geometry: Geometry,
                              mode: str = STRICT) -> GroundState:
    """Structured ``V^{1/2}`` and ``V^{-1/2}`` for ``V = Z^2 / n_y``.

    The result is cached per (model, geometry) and unpacks as
    ``vhalf, vinvhalf``.
    """
    require_valid(couplings, mode)
    return _ground_state(couplings.gap, couplings.q, geometry.n_x, geometry.n_y)


@dataclass(frozen=True, eq=False)
class BlockPair:
    """Blocks ``A`` (of ``V^{-1/2}``) and ``D`` (of ``V^{1/2}``) for one subsystem.

    ``A = sqrt(n_y) [A0 (x) 1 + (A1 - A0) (x) P]`` and
    ``D = [D0 (x) 1 + n_y D1 (x) P] / sqrt(n_y)`` where ``P`` is the
    ``l_y x l_y`` matrix with every entry ``1 / n_y``.
    """

    a0: np.ndarray
    a1: np.ndarray
    d0: np.ndarray
    d1: np.ndarray
    l_y: int
    n_y: int

    @property
    def l_x(self) -> int:
        return self.a0.shape[0]

    @property
    def a(self) -> StructuredCorrelation:
        root = math.sqrt(self.n_y)
        return StructuredCorrelation(self.a0 * root, (self.a1 - self.a0) * root, self.n_y)

    @property
    def d(self) -> StructuredCorrelation:
        root = math.sqrt(self.n_y)
        return StructuredCorrelation(self.d0 / root, self.d1 * root, self.n_y)


def extract_block(state: GroundState, block: BlockSpec,
                  chains: Optional[Iterable[int]] = None) -> BlockPair:
    """Exact structured ``A`` and ``D`` blocks for ``block``.

    ``chains`` may list which ``l_y`` chains form the block. The result does
    not depend on the choice because the inter-chain coupling is uniform; the
    argument is only validated.
    """
    geometry = Geometry(state.n_x, state.n_y)
    window = block.x_window(geometry)
    if chains is not None:
        chains = list(chains)
        if len(chains) != block.l_y or len(set(chains)) != len(chains):
            raise BlockOutOfRange(f"need {block.l_y} distinct chains, got {chains}")
        if min(chains) < 0 or max(chains) >= state.n_y:
            raise BlockOutOfRange(f"chain index out of range 0..{state.n_y - 1}: {chains}")
    sub = (window, window)
    return BlockPair(
        a0=state.gap_inv[sub],
        a1=state.collective_inv[sub],
        d0=state.gap[sub],
        d1=state.q[sub],
        l_y=block.l_y,
        n_y=state.n_y,
    )


def materialize(s, l_y: Optional[int] = None, cap: int = DEFAULT_SIZE_CAP):
    """Dense form of a structured correlation restricted to ``l_y`` chains.

    A :class:`BlockPair` materializes to the tuple ``(A, D)``.
    """
    if isinstance(s, BlockPair):
        l_y = s.l_y if l_y is None else l_y
        return materialize(s.a, l_y, cap), materialize(s.d, l_y, cap)
    l_y = s.n_y if l_y is None else l_y
    if l_y < 1:
        raise ValueError("l_y must be positive")
    if s.n_x * l_y > cap:
        raise SizeCapExceeded(f"{s.n_x * l_y} x {s.n_x * l_y} exceeds size cap {cap}")
    uniform = np.full((l_y, l_y), 1.0 / s.n_y)
    return np.kron(np.eye(l_y), s.x0) + np.kron(uniform, s.x1)
