"""
Block-size sweeps, scaling-law fits and the asymptotic consistency checks.

The fitted law is

    S(l_x, l_y) ~ b * l_x * ln(l_y) + a1 * l_x + a2 * l_y + a0

with target ``b = 1/2``. The linear coefficients stand in for the
unspecified constants of the upper and lower bounds.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .correlations import BlockPair, extract_block, ground_state_correlations
from .entropy import block_spectrum, entanglement_entropy, product_eigenvalues
from .errors import DegenerateDesign
from .model import STRICT, BlockSpec, ChainCouplings, Geometry, Placement
from .spectral import trace_ratio_constant

CSV_HEADER = ("l_x", "l_y", "S", "S1", "S2", "wall_ms")


@dataclass(frozen=True)
class SweepRow:
    l_x: int
    l_y: int
    S: float
    S1: float
    S2: float
    wall_ms: float = float("nan")


@dataclass
class SweepTable:
    rows: list
    fingerprint: str = ""

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def to_csv(self, timings: bool = False) -> str:
        """CSV text with floats at 17 significant digits.

        ``wall_ms`` is left empty unless ``timings`` is set, which keeps the
        output byte-identical between runs.
        """
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            wall = f"{r.wall_ms:.3f}" if timings and math.isfinite(r.wall_ms) else ""
            writer.writerow([r.l_x, r.l_y, f"{r.S:.17g}", f"{r.S1:.17g}", f"{r.S2:.17g}", wall])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"expected CSV header {','.join(CSV_HEADER)}, got {reader.fieldnames}")
        rows = []
        for rec in reader:
            wall = rec["wall_ms"]
            rows.append(SweepRow(int(rec["l_x"]), int(rec["l_y"]), float(rec["S"]), float(rec["S1"]),
                                 float(rec["S2"]), float(wall) if wall else float("nan")))
        return cls(rows)


def parse_grid(text: str) -> list[tuple[int, int]]:
    """Parse ``"lx=2,4,8;ly=16,32"`` into the cartesian grid of (l_x, l_y)."""
    parts = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        key, sep, values = chunk.partition("=")
        key = key.strip().lower()
        if not sep or key not in ("lx", "ly"):
            raise ValueError(f"bad grid component {chunk!r}; expected lx=... or ly=...")
        parts[key] = [int(v) for v in values.split(",") if v.strip()]
    if set(parts) != {"lx", "ly"} or not parts["lx"] or not parts["ly"]:
        raise ValueError(f"grid {text!r} needs both lx= and ly= lists")
    return [(lx, ly) for lx in parts["lx"] for ly in parts["ly"]]


def _fingerprint(couplings, geometry, placement, mode) -> str:
    text = f"lam={couplings.lam.coeffs};q={couplings.q.coeffs};n_x={geometry.n_x};" \
           f"n_y={geometry.n_y};placement={placement};mode={mode}"
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def sweep(couplings: ChainCouplings, geometry: Geometry, grid: Iterable[tuple[int, int]],
          placement="centered", mode: str = STRICT, workers: int = 1) -> SweepTable:
    """Structured-path entropies for every ``(l_x, l_y)`` in ``grid``.

    Rows come back sorted by ``(l_x, l_y)`` regardless of ``workers``.
    """
    placement = Placement.parse(placement)
    keys = sorted(set((int(lx), int(ly)) for lx, ly in grid))
    blocks = [BlockSpec(lx, ly, placement) for lx, ly in keys]
    for b in blocks:
        b.check(geometry)
    state = ground_state_correlations(couplings, geometry, mode)

    def one(block):
        t0 = time.perf_counter()
        res = entanglement_entropy(block_spectrum(extract_block(state, block)))
        wall = 1e3 * (time.perf_counter() - t0)
        return SweepRow(block.l_x, block.l_y, res.S, res.S1, res.S2, wall)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, blocks))
    else:
        rows = [one(b) for b in blocks]
    return SweepTable(rows, _fingerprint(couplings, geometry, placement, mode))


def _lstsq_scaled(features: np.ndarray, target: np.ndarray) -> np.ndarray:
    # normal equations on unit-norm columns
    norms = np.linalg.norm(features, axis=0)
    if np.any(norms == 0):
        raise DegenerateDesign("a feature column is identically zero")
    scaled = features / norms
    gram = scaled.T @ scaled
    if np.linalg.cond(gram) > 1e12:
        raise DegenerateDesign(f"design matrix is rank deficient (cond {np.linalg.cond(gram):.3g})")
    coef = np.linalg.solve(gram, scaled.T @ target)
    # one refinement step recovers the accuracy lost by squaring the condition number
    resid = target - scaled @ coef
    coef = coef + np.linalg.solve(gram, scaled.T @ resid)
    return coef / norms


@dataclass(frozen=True)
class ScalingFit:
    b: float
    a1: float
    a2: float
    a0: float
    rms_residual: float
    n_rows: int

    def __str__(self):
        return (f"b={self.b:.10g} a1={self.a1:.10g} a2={self.a2:.10g} a0={self.a0:.10g} "
                f"rms={self.rms_residual:.3g} rows={self.n_rows}")


def scaling_fit(table: SweepTable) -> ScalingFit:
    """Least-squares fit of ``S`` on ``{l_x ln l_y, l_x, l_y, 1}``."""
    lx, ly, s = table.column("l_x"), table.column("l_y"), table.column("S")
    if len(table) < 8 or np.unique(lx).size < 2 or np.unique(ly).size < 3:
        raise DegenerateDesign("need >= 8 rows spanning >= 2 distinct l_x and >= 3 distinct l_y")
    features = np.column_stack([lx * np.log(ly), lx, ly, np.ones_like(lx)])
    coef = _lstsq_scaled(features, s)
    rms = float(np.sqrt(np.mean((s - features @ coef) ** 2)))
    return ScalingFit(*map(float, coef), rms, len(table))


@dataclass(frozen=True)
class BoundsResidual:
    """Fit of ``R = S - (l_x/2) ln l_y`` on ``{l_x, l_y, 1}``."""

    c_lx: float
    c_ly: float
    c_0: float
    r_squared: float
    max_abs_residual: float


def bounds_residual(table: SweepTable) -> BoundsResidual:
    lx, ly, s = table.column("l_x"), table.column("l_y"), table.column("S")
    if np.unique(lx).size < 2 or np.unique(ly).size < 2:
        raise DegenerateDesign("residual fit needs >= 2 distinct l_x and >= 2 distinct l_y")
    r = s - 0.5 * lx * np.log(ly)
    features = np.column_stack([lx, ly, np.ones_like(lx)])
    coef = _lstsq_scaled(features, r)
    resid = r - features @ coef
    total = float(np.sum((r - r.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / total if total > 0 else 1.0
    return BoundsResidual(*map(float, coef), r2, float(np.abs(resid).max()))


def saturation_curve(couplings: ChainCouplings, geometry: Geometry, l_y: int,
                     lx_grid: Sequence[int], placement="centered",
                     mode: str = STRICT) -> list[tuple[int, float]]:
    """``S1 / (l_y - 1)`` as a function of ``l_x``.

    This is the entropy of a single gapped chain with interaction
    ``(Lambda - Q)^2`` and should saturate in ``l_x``.
    """
    if l_y < 2:
        raise ValueError("saturation curve needs l_y >= 2")
    state = ground_state_correlations(couplings, geometry, mode)
    out = []
    for lx in lx_grid:
        res = entanglement_entropy(block_spectrum(extract_block(state, BlockSpec(lx, l_y, placement))))
        out.append((int(lx), res.S1 / (l_y - 1)))
    return out


@dataclass(frozen=True)
class LidskiiRow:
    l_y: int
    max_deviation: float
    bound: float
    relative_deviation: float
    trace_residual: float
    slack: float = 0.0

    @property
    def holds(self) -> bool:
        # the bound can be attained exactly (e.g. D1 = identity); allow solver rounding
        return self.max_deviation <= self.bound + self.slack


def lidskii_check(bp: BlockPair, ly_grid: Sequence[int]) -> list[LidskiiRow]:
    """Compare ``alpha_k(A0 D0 + l_y A0 D1)`` with ``l_y alpha_k(A0 D1)``.

    Both spectra come from the same congruence ``A0 = L L^T``, so the Weyl
    inequality bounds every deviation by ``lambda_max(A0 D0)``.
    ``relative_deviation`` is the deviation over ``l_y lambda_max(A0 D1)``
    and falls like ``1 / l_y``; ``trace_residual`` is the relative error
    of the trace identity.
    """
    a0d0, err0 = product_eigenvalues(bp.a0, bp.d0, return_error=True)
    a0d1, err1 = product_eigenvalues(bp.a0, bp.d1, return_error=True)
    bound = float(a0d0[-1])
    tr0 = float(np.trace(bp.a0 @ bp.d0))
    tr1 = float(np.trace(bp.a0 @ bp.d1))
    rows = []
    for ly in ly_grid:
        mixed, err = product_eigenvalues(bp.a0, bp.d0 + ly * bp.d1, return_error=True)
        dev = float(np.abs(mixed - ly * a0d1).max())
        top = ly * float(a0d1[-1])
        expected = tr0 + ly * tr1
        rows.append(LidskiiRow(int(ly), dev, bound, dev / top if top > 0 else float("nan"),
                               abs(float(mixed.sum()) - expected) / abs(expected),
                               slack=err + ly * err1 + err0))
    return rows


@dataclass(frozen=True)
class SzegoTraceReport:
    l_x: int
    trace_ratio: float
    constant: float

    @property
    def deviation(self) -> float:
        return abs(self.trace_ratio - self.constant)

    @property
    def relative_deviation(self) -> float:
        return self.deviation / abs(self.constant) if self.constant else self.deviation


def szego_consequence_check(bp: BlockPair, lam, q, quadrature_points: int = 4096) -> SzegoTraceReport:
    """``trace(A0 @ D1) / l_x`` against the circle average of ``q / (lambda - q)``."""
    ratio = float(np.sum(bp.a0 * bp.d1)) / bp.l_x  # trace of a product of symmetric matrices
    return SzegoTraceReport(bp.l_x, ratio, trace_ratio_constant(lam, q, quadrature_points))


def szego_trace_curve(couplings: ChainCouplings, geometry: Geometry, lx_grid: Sequence[int],
                      placement="centered", mode: str = STRICT) -> list[SzegoTraceReport]:
    state = ground_state_correlations(couplings, geometry, mode)
    return [szego_consequence_check(extract_block(state, BlockSpec(lx, 1, placement)),
                                    couplings.lam, couplings.q) for lx in lx_grid]
