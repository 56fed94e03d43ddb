import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectral_sens.cluster import cluster_gap_guard, default_cluster_tol, locate_cluster
from spectral_sens.errors import ShapeError


class TestLocateCluster:
    def test_interior_cluster(self):
        c = locate_cluster([5.0, 3.0, 3.0, 3.0, 1.0], 3, 1e-8)
        assert (c.i, c.j, c.r) == (2, 1, 3)
        assert (c.lo, c.hi) == (2, 4)
        assert c.value == 3.0

    def test_simple_eigenvalue(self):
        c = locate_cluster([7.0, 4.0, 2.0], 2, 1e-8)
        assert (c.i, c.j, c.r) == (1, 0, 1)

    def test_last_index_of_full_cluster(self):
        c = locate_cluster([3.0, 3.0, 3.0], 3, 1e-8)
        assert (c.i, c.j) == (3, 0)

    def test_first_index_of_full_cluster(self):
        c = locate_cluster([3.0, 3.0, 3.0], 1, 1e-8)
        assert (c.i, c.j) == (1, 2)

    def test_chaining_absorbs_near_equal_neighbor(self):
        c = locate_cluster([3.0 + 1e-12, 3.0, 1.0], 2, 1e-8)
        assert (c.i, c.j) == (2, 0)

    def test_chained_cluster_can_exceed_tolerance_width(self):
        # adjacent gaps all below tol, total spread above it
        tol = 1e-8
        vals = [3.0, 3.0 - 0.9 * tol, 3.0 - 1.8 * tol, 1.0]
        c = locate_cluster(vals, 2, tol)
        assert (c.lo, c.hi) == (1, 3)
        assert c.width == pytest.approx(1.8 * tol, rel=1e-6)

    def test_rejects_out_of_range_m(self):
        with pytest.raises(ShapeError):
            locate_cluster([2.0, 1.0], 3, 0.0)
        with pytest.raises(ShapeError):
            locate_cluster([2.0, 1.0], 0, 0.0)

    def test_rejects_non_monotone_input(self):
        with pytest.raises(ValueError):
            locate_cluster([1.0, 2.0], 1, 0.0)

    def test_rejects_negative_tolerance(self):
        with pytest.raises(ValueError):
            locate_cluster([2.0, 1.0], 1, -1e-3)


class TestClusterGapGuard:
    def test_interior_cluster_guard(self):
        vals = [5.0, 3.0, 3.0, 3.0, 1.0]
        c = locate_cluster(vals, 3, 1e-8)
        assert cluster_gap_guard(vals, c) == 2.0

    def test_full_spectrum_cluster_guard_is_infinite(self):
        vals = [3.0, 3.0, 3.0]
        c = locate_cluster(vals, 2, 1e-8)
        assert cluster_gap_guard(vals, c) == math.inf

    def test_guard_after_chaining(self):
        vals = [3.0 + 1e-12, 3.0, 1.0]
        c = locate_cluster(vals, 2, 1e-8)
        assert cluster_gap_guard(vals, c) == pytest.approx(2.0, abs=1e-9)


def test_default_cluster_tol_floors_at_one():
    assert default_cluster_tol(0.5) == 1e-8
    assert default_cluster_tol(100.0) == 1e-6


# Dyadic values keep every gap comparison exact, so properties such as shift
# invariance are not blurred by rounding.
dyadic_lists = st.lists(
    st.integers(-256, 256).map(lambda k: k / 64.0), min_size=1, max_size=12
).map(lambda vs: sorted(vs, reverse=True))


@given(vals=dyadic_lists, data=st.data())
def test_cluster_block_is_maximal_and_contains_m(vals, data):
    m = data.draw(st.integers(1, len(vals)))
    tol = data.draw(st.sampled_from([0.0, 1 / 128.0, 1 / 64.0, 1 / 16.0]))
    c = locate_cluster(vals, m, tol)
    assert c.lo <= m <= c.hi
    for k in range(c.lo, c.hi):
        assert vals[k - 1] - vals[k] <= tol
    if c.lo > 1:
        assert vals[c.lo - 2] - vals[c.lo - 1] > tol
    if c.hi < len(vals):
        assert vals[c.hi - 1] - vals[c.hi] > tol


@given(vals=dyadic_lists, data=st.data())
def test_cluster_invariant_under_constant_shift(vals, data):
    m = data.draw(st.integers(1, len(vals)))
    tol = data.draw(st.sampled_from([0.0, 1 / 128.0, 1 / 16.0]))
    shift = data.draw(st.integers(-8, 8).map(lambda k: k / 4.0))
    c = locate_cluster(vals, m, tol)
    shifted = locate_cluster([v + shift for v in vals], m, tol)
    assert (c.i, c.j, c.r) == (shifted.i, shifted.j, shifted.r)


@given(
    levels=st.lists(st.integers(-20, 20), min_size=1, max_size=5, unique=True),
    data=st.data(),
)
def test_exact_counts_at_zero_tolerance(levels, data):
    counts = [data.draw(st.integers(1, 3)) for _ in levels]
    vals = sorted(
        [float(v) for v, c in zip(levels, counts) for _ in range(c)], reverse=True
    )
    m = data.draw(st.integers(1, len(vals)))
    c = locate_cluster(vals, m, 0.0)
    target = vals[m - 1]
    assert c.i == 1 + sum(1 for k in range(m - 1) if vals[k] == target)
    assert c.j == sum(1 for k in range(m, len(vals)) if vals[k] == target)
