import itertools

import numpy as np
import pytest

from harmchains.errors import IndexOutOfRange, SizeCapExceeded
from harmchains.model import BlockSpec, ChainCouplings, Geometry
from harmchains.oracle import (block_indices, dense_entropy, dense_ground_state, equivalence_suite)


def test_scalar_decoupled():
    dc = dense_ground_state(ChainCouplings((2,), (0,)), Geometry(1, 2))
    np.testing.assert_allclose(dc.vhalf, np.eye(2) * 2 / np.sqrt(2), atol=1e-14)


def test_dense_inverse_pair(reference):
    dc = dense_ground_state(reference, Geometry(4, 5))
    np.testing.assert_allclose(dc.vhalf @ dc.vinvhalf, np.eye(20), atol=1e-9)


def test_whole_system_pure(reference):
    dc = dense_ground_state(reference, Geometry(3, 4))
    assert dense_entropy(dc, range(12)) < 1e-9


def test_complement_symmetry_all_bipartitions(reference):
    g = Geometry(4, 4)
    dc = dense_ground_state(reference, g)
    everything = set(range(g.size))
    worst = 0.0
    for size in range(1, 9):
        for subset in itertools.combinations(range(g.size), size):
            if size == 8 and 0 not in subset:
                continue
            rest = sorted(everything.difference(subset))
            worst = max(worst, abs(dense_entropy(dc, subset) - dense_entropy(dc, rest)))
    assert worst < 1e-6


def test_order_independence(reference):
    dc = dense_ground_state(reference, Geometry(3, 3))
    idx = [0, 4, 5, 7]
    assert abs(dense_entropy(dc, idx) - dense_entropy(dc, idx[::-1])) < 1e-12


def test_scattered_chains_equal_contiguous(reference):
    g = Geometry(3, 6)
    dc = dense_ground_state(reference, g)
    block = BlockSpec(2, 3, "corner")
    s_contig = dense_entropy(dc, block_indices(g, block, chains=[0, 1, 2]))
    s_scatter = dense_entropy(dc, block_indices(g, block, chains=[0, 2, 5]))
    assert abs(s_contig - s_scatter) < 1e-9


def test_index_errors(reference):
    dc = dense_ground_state(reference, Geometry(2, 2))
    with pytest.raises(IndexOutOfRange):
        dense_entropy(dc, [])
    with pytest.raises(IndexOutOfRange):
        dense_entropy(dc, [0, 4])
    with pytest.raises(IndexOutOfRange):
        dense_entropy(dc, [1, 1])


def test_size_cap(reference):
    with pytest.raises(SizeCapExceeded):
        dense_ground_state(reference, Geometry(10, 10), cap=50)


def test_equivalence_suite_small(reference):
    records = equivalence_suite(reference, Geometry(3, 3))
    assert max(r.entropy_error for r in records) < 1e-10
    # 6 x-windows times 6 y-windows
    assert len(records) == 36
