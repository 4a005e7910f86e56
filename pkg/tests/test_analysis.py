import math

import numpy as np
import pytest

from harmchains.analysis import (SweepRow, SweepTable, bounds_residual, lidskii_check, parse_grid,
                                 saturation_curve, scaling_fit, sweep, szego_consequence_check,
                                 szego_trace_curve)
from harmchains.correlations import extract_block, ground_state_correlations
from harmchains.errors import DegenerateDesign
from harmchains.model import BlockSpec, ChainCouplings, Geometry
from harmchains.oracle import block_indices, dense_entropy, dense_ground_state

GRID = [(lx, ly) for lx in (2, 4, 8, 16) for ly in (16, 32, 64, 128)]


def synthetic(f, grid=GRID):
    return SweepTable([SweepRow(lx, ly, f(lx, ly), 0.0, 0.0) for lx, ly in grid])


def law(lx, ly):
    return 0.5 * lx * math.log(ly) + 2 * lx + 3 * ly + 1


def test_parse_grid():
    assert parse_grid("lx=2,4;ly=16,32") == [(2, 16), (2, 32), (4, 16), (4, 32)]
    for bad in ("lx=2", "lx=2;lz=3", "ly=;lx=1", "garbage"):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_sweep_full_block_is_zero(reference):
    t = sweep(reference, Geometry(5, 4), [(5, 4)])
    assert len(t) == 1 and abs(t.rows[0].S) < 1e-9


def test_sweep_decoupled_proportional(decoupled):
    t = sweep(decoupled, Geometry(8, 8), [(2, 1), (2, 2), (2, 4)], mode="permissive")
    s = t.column("S")
    np.testing.assert_allclose(s / t.column("l_y"), s[0], rtol=1e-10)


def test_sweep_matches_oracle(reference):
    g = Geometry(6, 6)
    grid = [(lx, ly) for lx in range(1, 5) for ly in range(1, 5)]
    t = sweep(reference, g, grid)
    assert len(t) == 16
    dc = dense_ground_state(reference, g)
    for row in t.rows:
        block = BlockSpec(row.l_x, row.l_y)
        assert abs(row.S - dense_entropy(dc, block_indices(g, block))) < 1e-8


def test_sweep_deterministic_and_parallel_safe(reference):
    g = Geometry(64, 512)
    a = sweep(reference, g, GRID[:8])
    b = sweep(reference, g, reversed(GRID[:8]), workers=4)
    assert a.to_csv() == b.to_csv()
    assert a.fingerprint == b.fingerprint


def test_csv_round_trip(reference):
    t = sweep(reference, Geometry(32, 256), GRID[:6])
    back = SweepTable.from_csv(t.to_csv())
    assert [(r.l_x, r.l_y, r.S, r.S1, r.S2) for r in back.rows] == \
           [(r.l_x, r.l_y, r.S, r.S1, r.S2) for r in t.rows]
    assert t.to_csv().splitlines()[0] == "l_x,l_y,S,S1,S2,wall_ms"
    assert math.isfinite(SweepTable.from_csv(t.to_csv(timings=True)).rows[0].wall_ms)
    with pytest.raises(ValueError):
        SweepTable.from_csv("a,b\n1,2\n")


def test_scaling_fit_exact_recovery():
    fit = scaling_fit(synthetic(law))
    assert fit.b == pytest.approx(0.5, abs=1e-10)
    assert fit.a1 == pytest.approx(2, abs=1e-10)
    assert fit.a2 == pytest.approx(3, abs=1e-10)
    assert fit.a0 == pytest.approx(1, abs=1e-10)
    assert fit.rms_residual < 1e-10


def test_scaling_fit_noise_robust():
    rng = np.random.default_rng(1)
    noise = {key: rng.uniform(-1e-6, 1e-6) for key in GRID}
    fit = scaling_fit(synthetic(lambda lx, ly: law(lx, ly) + noise[(lx, ly)]))
    for got, want in zip((fit.b, fit.a1, fit.a2, fit.a0), (0.5, 2, 3, 1)):
        assert abs(got - want) < 1e-4


def test_scaling_fit_degenerate():
    with pytest.raises(DegenerateDesign):
        scaling_fit(synthetic(law, [(2, ly) for ly in (16, 32, 64, 128, 256, 512, 1024, 2048)]))
    with pytest.raises(DegenerateDesign):
        scaling_fit(synthetic(law, GRID[:4]))


def test_bounds_residual_exact_linear():
    res = bounds_residual(synthetic(law))
    assert res.r_squared == pytest.approx(1.0, abs=1e-12)
    assert res.c_lx == pytest.approx(2) and res.c_ly == pytest.approx(3)


def test_bounds_residual_single_ly():
    with pytest.raises(DegenerateDesign):
        bounds_residual(synthetic(law, [(lx, 16) for lx in (2, 4, 8)]))


def test_saturation_reference(reference):
    curve = saturation_curve(reference, Geometry(256, 4096), 16, [2, 4, 8, 16, 32])
    values = [v for _, v in curve]
    assert abs(values[-1] - values[-2]) < 1e-3
    increments = np.abs(np.diff(values))
    assert increments[-1] <= increments[0]


def test_saturation_full_chain_is_zero(reference):
    curve = saturation_curve(reference, Geometry(8, 6), 6, [8])
    assert abs(curve[0][1]) < 1e-12


def test_saturation_decoupled_is_single_chain(decoupled):
    # with Q = 0 the normalized S1 is the entropy of one chain of interaction Lambda^2
    g = Geometry(40, 8)
    curve = saturation_curve(decoupled, g, 3, [4, 8, 16], mode="permissive")
    dc = dense_ground_state(decoupled, Geometry(40, 2))
    for lx, value in curve:
        chain = block_indices(Geometry(40, 2), BlockSpec(lx, 1))
        assert value == pytest.approx(dense_entropy(dc, chain), abs=1e-9)


@pytest.mark.parametrize("lx", [2, 4, 8])
def test_lidskii_reference(reference, lx):
    bp = extract_block(ground_state_correlations(reference, Geometry(64, 1024)), BlockSpec(lx, 1))
    rows = lidskii_check(bp, [4, 16, 64, 256])
    assert all(r.holds for r in rows)
    assert all(r.trace_residual < 1e-10 for r in rows)
    rel = [r.relative_deviation for r in rows]
    assert all(b < a for a, b in zip(rel, rel[1:]))


def test_lidskii_zero_d1(decoupled):
    bp = extract_block(ground_state_correlations(decoupled, Geometry(16, 8), "permissive"), BlockSpec(4, 1))
    from harmchains.entropy import product_eigenvalues
    base = product_eigenvalues(bp.a0, bp.d0)
    for row in lidskii_check(bp, [4, 16]):
        assert row.max_deviation - base.max() == pytest.approx(0.0, abs=1e-12)
        assert row.holds


def test_szego_trace_reference(reference):
    bp = extract_block(ground_state_correlations(reference, Geometry(512, 64)), BlockSpec(128, 1))
    rep = szego_consequence_check(bp, reference.lam, reference.q)
    assert rep.relative_deviation < 0.01
    assert rep.constant == pytest.approx(1 / math.sqrt(5), abs=1e-12)


def test_szego_trace_decoupled(decoupled):
    bp = extract_block(ground_state_correlations(decoupled, Geometry(64, 8), "permissive"), BlockSpec(16, 1))
    rep = szego_consequence_check(bp, decoupled.lam, decoupled.q)
    assert rep.trace_ratio == 0.0 and rep.constant == 0.0


def test_szego_trace_deviation_decreases(reference):
    # corner windows carry a boundary error that decays like 1/l_x
    corner = szego_trace_curve(reference, Geometry(512, 64), [8, 32, 128], placement="corner")
    devs = [r.relative_deviation for r in corner]
    assert devs[0] > devs[1] > devs[2]
    centered = szego_trace_curve(reference, Geometry(512, 64), [8, 32, 128])
    assert centered[2].relative_deviation <= max(centered[0].relative_deviation, 1e-12)


def test_szego_trace_longer_range_model():
    c = ChainCouplings((5.0, 1.0, 0.3), (1.0, 0.2))
    reps = szego_trace_curve(c, Geometry(512, 64), [8, 32, 128])
    devs = [r.relative_deviation for r in reps]
    # banded Q loses its off-diagonal products at the window edges: O(1/l_x)
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 0.01
    assert devs[0] / devs[2] == pytest.approx(16, rel=0.05)
