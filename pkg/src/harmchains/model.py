"""
Model definition: chain couplings, lattice geometry and the block window.

The coupling matrix is ``V = Z^2 / n_y`` with ``Z`` carrying ``Lambda`` in
its diagonal ``n_x x n_x`` blocks and ``Q`` in every off-diagonal block.
Oscillators are indexed chain-major, ``i = y * n_x + x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import BlockOutOfRange, ValidationFailed
from .spectral import DEFAULT_QUADRATURE_POINTS, SpectralFunction, ToeplitzCoeffs, as_coeffs, build_toeplitz

STRICT = "strict"
PERMISSIVE = "permissive"
MODES = (STRICT, PERMISSIVE)


@dataclass(frozen=True)
class ChainCouplings:
    """Intra-chain coefficients ``lam`` (matrix Lambda) and inter-chain ``q`` (matrix Q)."""

    lam: ToeplitzCoeffs
    q: ToeplitzCoeffs

    def __post_init__(self):
        object.__setattr__(self, "lam", as_coeffs(self.lam))
        object.__setattr__(self, "q", as_coeffs(self.q))

    @property
    def gap(self) -> ToeplitzCoeffs:
        """Coefficients of ``Lambda - Q``."""
        return self.lam - self.q


REFERENCE_MODEL = ChainCouplings((4.0, 1.0), (1.0,))


@dataclass(frozen=True)
class Geometry:
    n_x: int
    n_y: int

    def __post_init__(self):
        if int(self.n_x) != self.n_x or self.n_x < 1:
            raise ValueError(f"n_x must be a positive integer, got {self.n_x}")
        if int(self.n_y) != self.n_y or self.n_y < 2:
            raise ValueError(f"n_y must be an integer >= 2, got {self.n_y}")
        object.__setattr__(self, "n_x", int(self.n_x))
        object.__setattr__(self, "n_y", int(self.n_y))

    @property
    def size(self) -> int:
        return self.n_x * self.n_y


@dataclass(frozen=True)
class Placement:
    """Where the x-window of a block sits along the chain.

    ``kind`` is ``"corner"``, ``"centered"`` or ``"offset"``; only the last
    uses ``offset``.
    """

    kind: str = "centered"
    offset: int = 0

    def __post_init__(self):
        if self.kind not in ("corner", "centered", "offset"):
            raise ValueError(f"unknown placement {self.kind!r}")
        if self.kind == "offset" and self.offset < 0:
            raise ValueError("offset must be non-negative")

    @classmethod
    def parse(cls, text) -> "Placement":
        if isinstance(text, Placement):
            return text
        text = str(text).strip().lower()
        if text.startswith("offset"):
            _, _, value = text.partition("=")
            try:
                return cls("offset", int(value))
            except ValueError:
                raise ValueError(f"bad placement {text!r}, expected offset=<k>") from None
        return cls(text)

    def start(self, n_x: int, l_x: int) -> int:
        if self.kind == "corner":
            return 0
        if self.kind == "centered":
            return (n_x - l_x) // 2
        return self.offset

    def __str__(self):
        return f"offset={self.offset}" if self.kind == "offset" else self.kind


@dataclass(frozen=True)
class BlockSpec:
    l_x: int
    l_y: int
    placement: Placement = field(default_factory=Placement)

    def __post_init__(self):
        object.__setattr__(self, "placement", Placement.parse(self.placement))
        if self.l_x < 1 or self.l_y < 1:
            raise BlockOutOfRange(f"block sizes must be positive, got ({self.l_x}, {self.l_y})")

    @property
    def size(self) -> int:
        return self.l_x * self.l_y

    def check(self, geometry: Geometry) -> None:
        if self.l_x > geometry.n_x or self.l_y > geometry.n_y:
            raise BlockOutOfRange(
                f"block {self.l_x}x{self.l_y} does not fit lattice {geometry.n_x}x{geometry.n_y}")
        start = self.placement.start(geometry.n_x, self.l_x)
        if start + self.l_x > geometry.n_x:
            raise BlockOutOfRange(
                f"x-window [{start}, {start + self.l_x}) exceeds n_x={geometry.n_x}")

    def x_window(self, geometry: Geometry) -> slice:
        self.check(geometry)
        start = self.placement.start(geometry.n_x, self.l_x)
        return slice(start, start + self.l_x)


@dataclass(frozen=True)
class ValidationReport:
    mode: str
    min_lambda: float
    min_q: float
    min_gap: float
    passed: bool
    messages: tuple = ()

    def __bool__(self):
        return self.passed

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{status} ({self.mode}): min(λ)={self.min_lambda:.12g} "
                 f"min(q)={self.min_q:.12g} min(λ−q)={self.min_gap:.12g}"]
        lines.extend(self.messages)
        return "\n".join(lines)


def _clean(x: float) -> float:
    # grid/stationary-point minima of integer symbols come back as e.g. 4e-16
    return 0.0 if abs(x) < 1e-12 else x


def validate(couplings: ChainCouplings, mode: str = STRICT,
             grid_points: int = DEFAULT_QUADRATURE_POINTS) -> ValidationReport:
    """Check the positivity assumptions on Lambda, Q and Lambda - Q.

    Strict mode requires all three symbols to be strictly positive.
    Permissive mode only requires ``lambda - q > 0`` and ``q >= 0``, which
    admits decoupled chains (``Q = 0``).
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    min_lam = _clean(SpectralFunction(couplings.lam).minimum(grid_points))
    min_q = _clean(SpectralFunction(couplings.q).minimum(grid_points))
    min_gap = _clean(SpectralFunction(couplings.gap).minimum(grid_points))

    messages = []
    if min_gap <= 0:
        messages.append(f"min(λ−q)={min_gap:.12g} is not positive")
    if mode == STRICT:
        if min_lam <= 0:
            messages.append(f"min(λ)={min_lam:.12g} is not positive")
        if min_q <= 0:
            messages.append(f"min(q)={min_q:.12g} is not positive")
    elif min_q < 0:
        messages.append(f"min(q)={min_q:.12g} is negative")
    return ValidationReport(mode, min_lam, min_q, min_gap, not messages, tuple(messages))


def require_valid(couplings: ChainCouplings, mode: str = STRICT) -> ValidationReport:
    report = validate(couplings, mode)
    if not report.passed:
        raise ValidationFailed(report)
    return report


@dataclass(frozen=True)
class FrequencyRange:
    min_freq: float
    max_freq: float
    n_y: int

    @property
    def scaled_min(self) -> float:
        """``min_freq * sqrt(n_y)``; independent of ``n_y``."""
        return self.min_freq * math.sqrt(self.n_y)


@lru_cache(maxsize=64)
def _sector_extremes(coeffs: ToeplitzCoeffs, n_x: int) -> tuple[float, float]:
    w = scipy.linalg.eigvalsh(build_toeplitz(coeffs, n_x))
    return float(w[0]), float(w[-1])


def spectrum_gap(couplings: ChainCouplings, geometry: Geometry, mode: str = STRICT) -> FrequencyRange:
    """Lowest and highest normal-mode frequency.

    The frequencies are the eigenvalues of ``V^{1/2} = Z / sqrt(n_y)``. They
    split into the sector ``(Lambda - Q)`` (multiplicity ``n_y - 1``) and the
    collective sector ``Lambda + (n_y - 1) Q``, both divided by ``sqrt(n_y)``.
    """
    require_valid(couplings, mode)
    root = math.sqrt(geometry.n_y)
    gap_lo, gap_hi = _sector_extremes(couplings.gap, geometry.n_x)
    collective = couplings.gap + couplings.q.scaled(geometry.n_y)
    coll_lo, coll_hi = _sector_extremes(collective, geometry.n_x)
    return FrequencyRange(min(gap_lo, coll_lo) / root, max(gap_hi, coll_hi) / root, geometry.n_y)
