"""
Finite-range symmetric Toeplitz matrices and their symbols.

A coefficient list ``c_0, ..., c_{R-1}`` defines both the banded matrix
``T[i, j] = c_{|i-j|}`` and the cosine polynomial

    g(theta) = c_0 + 2 * sum_{k>=1} c_k cos(k theta)

whose values bound the spectrum of every finite section. Integrals of
symbols use the uniform trapezoidal rule on ``[0, 2 pi)``, which is
spectrally accurate for smooth periodic integrands.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from numpy.polynomial import chebyshev

from .errors import NonPositiveGap, NonPositiveSymbol

DEFAULT_QUADRATURE_POINTS = 4096
DEFAULT_FOURIER_CUTOFF = 512


@dataclass(frozen=True)
class ToeplitzCoeffs:
    """Symmetric finite-range Toeplitz coefficients ``c_0 .. c_{R-1}``."""

    coeffs: tuple

    def __init__(self, coeffs: Sequence[float]):
        values = tuple(float(c) for c in np.atleast_1d(np.asarray(coeffs, dtype=float)))
        if len(values) == 0:
            raise ValueError("at least one coefficient is required")
        if not all(np.isfinite(values)):
            raise ValueError(f"coefficients must be finite, got {values}")
        object.__setattr__(self, "coeffs", values)

    @property
    def range(self) -> int:
        return len(self.coeffs)

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, self.range))
        out[: self.range] = self.coeffs
        return out

    def __add__(self, other: "ToeplitzCoeffs") -> "ToeplitzCoeffs":
        r = max(self.range, other.range)
        return ToeplitzCoeffs(self.padded(r) + other.padded(r))

    def __sub__(self, other: "ToeplitzCoeffs") -> "ToeplitzCoeffs":
        r = max(self.range, other.range)
        return ToeplitzCoeffs(self.padded(r) - other.padded(r))

    def scaled(self, factor: float) -> "ToeplitzCoeffs":
        return ToeplitzCoeffs(np.asarray(self.coeffs) * factor)

    def __len__(self):
        return self.range

    def __str__(self):
        return "{" + ", ".join(f"{c:g}" for c in self.coeffs) + "}"


def as_coeffs(c) -> ToeplitzCoeffs:
    return c if isinstance(c, ToeplitzCoeffs) else ToeplitzCoeffs(c)


def build_toeplitz(c, n: int) -> np.ndarray:
    """Dense ``n x n`` symmetric banded Toeplitz matrix with first row ``c``.

    Coefficients beyond ``n - 1`` are dropped, so any ``n >= 1`` is valid.
    """
    if n < 1:
        raise ValueError(f"matrix size must be positive, got {n}")
    c = as_coeffs(c)
    return scipy.linalg.toeplitz(c.padded(n)[:n])


@dataclass(frozen=True)
class SpectralFunction:
    """Cosine-polynomial symbol of a :class:`ToeplitzCoeffs`."""

    backing: ToeplitzCoeffs

    def __init__(self, backing):
        object.__setattr__(self, "backing", as_coeffs(backing))

    def __call__(self, theta):
        c = np.asarray(self.backing.coeffs)
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, c.size)
        value = c[0] + 2.0 * np.cos(np.multiply.outer(theta, k)) @ c[1:]
        return value if value.ndim else float(value)

    def chebyshev(self) -> chebyshev.Chebyshev:
        """The symbol as a polynomial in ``x = cos(theta)``."""
        c = np.asarray(self.backing.coeffs)
        return chebyshev.Chebyshev(np.concatenate([c[:1], 2.0 * c[1:]]))

    def extrema(self, grid_points: int = DEFAULT_QUADRATURE_POINTS) -> tuple[float, float]:
        """(min, max) of the symbol over the grid and every stationary point."""
        values = [self(quadrature_grid(grid_points))]
        cheb = self.chebyshev()
        candidates = [-1.0, 1.0]
        deriv = cheb.deriv() if cheb.degree() > 1 else None
        if deriv is not None:
            # drop negligible leading terms; the companion matrix divides by the top one
            deriv = deriv.trim(1e-14 * max(np.abs(deriv.coef).max(), 1e-300))
        if deriv is not None and deriv.degree() >= 1:
            roots = deriv.roots()
            real = roots[np.abs(roots.imag) < 1e-12].real
            candidates.extend(real[(real >= -1.0) & (real <= 1.0)])
        values.append(cheb(np.asarray(candidates)))
        values = np.concatenate([np.atleast_1d(v) for v in values])
        return float(values.min()), float(values.max())

    def minimum(self, grid_points: int = DEFAULT_QUADRATURE_POINTS) -> float:
        return self.extrema(grid_points)[0]


def eval_spectral(g, theta):
    """Evaluate ``g(theta) = c_0 + 2 sum_k c_k cos(k theta)``."""
    if not isinstance(g, SpectralFunction):
        g = SpectralFunction(g)
    return g(theta)


def quadrature_grid(points: int) -> np.ndarray:
    if points < 1:
        raise ValueError("quadrature needs at least one point")
    return 2.0 * np.pi * np.arange(points) / points


def trace_ratio_constant(lam, q, quadrature_points: int = DEFAULT_QUADRATURE_POINTS) -> float:
    """Mean over the circle of ``q / (lambda - q)``.

    This is the large-window limit of ``trace(A0 @ D1) / l_x``.

    Raises
    ------
    NonPositiveGap
        If ``lambda - q`` is not strictly positive.
    """
    lam, q = as_coeffs(lam), as_coeffs(q)
    gap = SpectralFunction(lam - q)
    if gap.minimum(quadrature_points) <= 0.0:
        raise NonPositiveGap(f"lambda(theta) - q(theta) <= 0 for lambda={lam}, q={q}")
    theta = quadrature_grid(quadrature_points)
    return float(np.mean(SpectralFunction(q)(theta) / gap(theta)))


@dataclass(frozen=True)
class SzegoEstimate:
    """Strong Szego asymptotic for ``ln det T_n``: ``leading + correction``."""

    leading: float
    correction: float
    log_mean: float
    n: int

    @property
    def estimate(self) -> float:
        return self.leading + self.correction


def log_symbol_fourier(g, cutoff: int = DEFAULT_FOURIER_CUTOFF,
                       quadrature_points: int = DEFAULT_QUADRATURE_POINTS) -> np.ndarray:
    """Fourier coefficients ``g_0 .. g_cutoff`` of ``ln g(theta)``."""
    if not isinstance(g, SpectralFunction):
        g = SpectralFunction(g)
    points = max(quadrature_points, 2 * cutoff + 2)
    if g.minimum(points) <= 0.0:
        raise NonPositiveSymbol(f"symbol {g.backing} is not strictly positive")
    samples = np.log(g(quadrature_grid(points)))
    return np.fft.rfft(samples)[: cutoff + 1] / points


def szego_logdet(g, n: int, cutoff: int = DEFAULT_FOURIER_CUTOFF,
                 quadrature_points: int = DEFAULT_QUADRATURE_POINTS) -> SzegoEstimate:
    """Szego estimate ``n * g_0 + sum_k k |g_k|^2`` of ``ln det build_toeplitz(g, n)``."""
    if n < 1:
        raise ValueError(f"matrix size must be positive, got {n}")
    gk = log_symbol_fourier(g, cutoff, quadrature_points)
    g0 = float(gk[0].real)
    k = np.arange(1, gk.size)
    correction = float(np.sum(k * np.abs(gk[1:]) ** 2))
    return SzegoEstimate(leading=g0 * n, correction=correction, log_mean=g0, n=n)


def toeplitz_logdet(c, n: int) -> float:
    """Exact ``ln det`` of a positive definite section via Cholesky."""
    factor = scipy.linalg.cholesky(build_toeplitz(c, n), lower=True)
    return float(2.0 * np.sum(np.log(np.diag(factor))))
