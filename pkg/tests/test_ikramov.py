import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral_sens.deriv_sv import sv_decomposition, sv_directional_derivative
from spectral_sens.directions import sphere_directions
from spectral_sens.errors import ShapeError
from spectral_sens.families import fd_partial_check
from spectral_sens.fd import fd_gradient
from spectral_sens.ikramov import (
    CriticalCase,
    analyze_direction_pair,
    build_q,
    classify_critical_point,
    coarse_maximize,
    critical_index,
    forward_backward,
    is_decisive,
    level_function_report,
    q_family,
)
from spectral_sens.instances import (
    first_order_flat_matrix,
    random_spread_matrix,
    random_unitary,
)


def random_instance(seed, scale=0.2):
    """Matrix with well-separated singular values and a small random anchor."""
    rng = np.random.default_rng(seed)
    a = random_spread_matrix(rng)
    xi0 = rng.uniform(-scale, scale, 4)
    return a, xi0


def dubious_matrix(seed):
    """sigma(A) = (2, 1, 1): at xi = 0 the critical index sits at within-cluster
    position 4 of a multiplicity-6 cluster, which is the inconclusive case."""
    rng = np.random.default_rng(seed)
    u, v = random_unitary(rng, 3), random_unitary(rng, 3)
    return u @ np.diag([2.0, 1.0, 1.0]) @ v.conj().T


class TestBuildQ:
    def test_entry_placement(self, rng):
        n = 3
        a = random_spread_matrix(rng).data
        xi = np.array([0.3, -0.7, 0.2, 0.5])
        q = build_q(a, xi).data
        assert q[0, n] == xi[0]
        assert q[0, 2 * n] == xi[2] + 1j * xi[3]
        assert q[n, 2 * n] == xi[1]
        for block in range(3):
            s = slice(block * n, (block + 1) * n)
            assert np.array_equal(q[s, s], a)
        assert np.array_equal(q[n:, :n], np.zeros((2 * n, n)))
        assert np.array_equal(q[2 * n :, n : 2 * n], np.zeros((n, n)))

    def test_zero_xi_leaves_only_diagonal_blocks(self, rng):
        a = random_spread_matrix(rng).data
        q = build_q(a, np.zeros(4)).data
        off = q.copy()
        for block in range(3):
            s = slice(3 * block, 3 * block + 3)
            off[s, s] = 0.0
        assert np.array_equal(off, np.zeros_like(off))

    def test_rejects_small_n(self):
        with pytest.raises(ShapeError):
            build_q(np.eye(2), np.zeros(4))

    def test_rejects_bad_xi(self, rng):
        with pytest.raises(ShapeError):
            build_q(random_spread_matrix(rng), np.zeros(3))


class TestQFamily:
    def test_partials_are_the_four_injection_blocks(self, rng):
        a = random_spread_matrix(rng)
        fam = q_family(a)
        n = 3
        eye = np.eye(n)
        xi = np.array([0.1, 0.2, 0.3, 0.4])
        p1 = fam.partial(xi, 1).data
        assert np.array_equal(p1[:n, n : 2 * n], eye) and np.linalg.norm(p1) == np.sqrt(n)
        p2 = fam.partial(xi, 2).data
        assert np.array_equal(p2[n : 2 * n, 2 * n :], eye)
        p3 = fam.partial(xi, 3).data
        assert np.array_equal(p3[:n, 2 * n :], eye)
        p4 = fam.partial(xi, 4).data
        assert np.array_equal(p4[:n, 2 * n :], 1j * eye)

    def test_eval_matches_build_q(self, rng):
        a = random_spread_matrix(rng)
        fam = q_family(a)
        xi = np.array([0.4, -0.1, 0.0, 0.9])
        assert np.array_equal(fam.evaluate(xi).data, build_q(a, xi).data)

    def test_fd_partial_check_exact(self, rng):
        fam = q_family(random_spread_matrix(rng))
        for j in (1, 2, 3, 4):
            assert fd_partial_check(fam, np.zeros(4), j, h=0.05) <= 1e-12


class TestIndexArithmetic:
    def test_decisive_condition(self):
        assert is_decisive(1, 1)
        assert is_decisive(1, 3)
        assert is_decisive(2, 3)  # 2 <= 3 - 1
        assert not is_decisive(3, 4)  # 3 > 4 - 2
        assert not is_decisive(4, 6)  # 4 > 6 - 3

    def test_synthetic_spectrum(self):
        f_fwd, f_bwd = forward_backward([3.0, 1.0, -2.0], 2)
        assert f_fwd == 1.0
        assert f_bwd == -1.0  # -mu_{3-(2-1)} = -mu_2

    def test_simple_spectrum(self):
        f_fwd, f_bwd = forward_backward([0.7], 1)
        assert f_fwd == 0.7 and f_bwd == -0.7

    def test_bottom_position(self):
        f_fwd, f_bwd = forward_backward([2.0, -1.0], 2)
        assert f_fwd == -1.0
        assert f_bwd == -2.0  # -mu_1

    def test_rejects_bad_position(self):
        with pytest.raises(ValueError):
            is_decisive(0, 3)
        with pytest.raises(ValueError):
            forward_backward([1.0, 0.0], 3)

    def test_rejects_unsorted_spectrum(self):
        with pytest.raises(ValueError):
            forward_backward([0.0, 1.0], 1)


class TestAnalyzeDirectionPair:
    @given(seed=st.integers(0, 10**9))
    @settings(max_examples=10)
    def test_reflection_identity_against_direct_computation(self, seed):
        a, xi0 = random_instance(seed)
        d = sphere_directions(4, 1, seed=seed)[0]
        rec = analyze_direction_pair(a, xi0, d)
        direct = sv_directional_derivative(q_family(a), xi0, critical_index(3), -rec.direction)
        assert abs(rec.f_backward - direct.derivative) <= 1e-9
        assert rec.reflection_delta <= 1e-9

    def test_simple_sigma_gives_antisymmetric_pair(self):
        a, xi0 = random_instance(41)
        rec = analyze_direction_pair(a, xi0, sphere_directions(4, 1, seed=5)[0])
        if rec.mu.size == 1:
            assert rec.f_backward == -rec.f_forward

    def test_trace_antisymmetry(self):
        a, xi0 = random_instance(17)
        d = sphere_directions(4, 1, seed=2)[0]
        fwd = analyze_direction_pair(a, xi0, d)
        bwd = analyze_direction_pair(a, xi0, -d)
        assert fwd.trace == pytest.approx(-bwd.trace, abs=1e-10)


class TestClassifyCriticalPoint:
    def test_flat_anchor_is_decisive_with_vanishing_derivatives(self):
        a = first_order_flat_matrix()
        dirs = sphere_directions(4, 24, seed=7)
        analysis = classify_critical_point(a, np.zeros(4), dirs)
        assert analysis.case is CriticalCase.DECISIVE
        assert (analysis.p, analysis.q, analysis.mult) == (1, 2, 3)
        assert analysis.sigma0 == pytest.approx(1.0, abs=1e-12)
        for rec in analysis.per_direction:
            assert abs(rec.f_forward) <= analysis.check_tol
            assert abs(rec.f_backward) <= analysis.check_tol
        assert analysis.refutations == ()
        # gradient of the cluster sum vanishes at the anchor, checked against FD
        assert np.max(np.abs(analysis.h_gradient)) <= 1e-10
        fam = q_family(a)

        def t(xi):
            sig = np.linalg.svd(fam.evaluate(xi).data, compute_uv=False)
            return float(np.sum(sig[6:9]))

        assert fd_gradient(t, np.zeros(4)) == pytest.approx([0.0] * 4, abs=1e-6)

    def test_flat_anchor_is_a_sampled_local_max(self):
        # independent confirmation that the anchor really is locally maximal
        a = first_order_flat_matrix()
        fam = q_family(a)
        f0 = float(sv_decomposition(fam.evaluate(np.zeros(4))).sigma[6])
        for d in sphere_directions(4, 20, seed=13):
            for t in (1e-2, 1e-1):
                val = float(sv_decomposition(fam.evaluate(t * d)).sigma[6])
                assert val <= f0 + 1e-9

    def test_dubious_case_reports_without_conclusion(self):
        a = dubious_matrix(3)
        analysis = classify_critical_point(a, np.zeros(4), sphere_directions(4, 6, seed=4))
        assert analysis.case is CriticalCase.DUBIOUS
        assert (analysis.p, analysis.q, analysis.mult) == (4, 2, 6)
        assert analysis.refutations == ()
        assert len(analysis.per_direction) == 6

    def test_simple_sigma_is_decisive(self):
        a, xi0 = random_instance(23)
        analysis = classify_critical_point(a, xi0, sphere_directions(4, 4, seed=9))
        assert analysis.mult >= 1
        if analysis.mult == 1:
            assert analysis.case is CriticalCase.DECISIVE

    def test_generic_point_is_refuted_in_the_decisive_case(self):
        # a generic interior point is not a maximizer: derivatives are nonzero
        a, xi0 = random_instance(57)
        analysis = classify_critical_point(a, xi0, sphere_directions(4, 16, seed=3))
        if analysis.case is not CriticalCase.DECISIVE:
            pytest.skip("generic instance unexpectedly landed in the dubious case")
        expected = tuple(
            idx
            for idx, rec in enumerate(analysis.per_direction)
            if abs(rec.f_forward) > analysis.check_tol
        )
        assert analysis.refutations == expected
        assert expected  # 16 sampled directions at a generic point cannot all be flat


class TestLevelFunction:
    def test_anchor_value_is_zero(self):
        a = first_order_flat_matrix()
        report = level_function_report(a, np.zeros(4))
        assert abs(report.h_value) <= 1e-10 * report.mult * report.sigma0

    def test_tangent_directions_have_traceless_spectrum(self):
        a, xi0 = random_instance(31)
        report = level_function_report(a, xi0)
        g = report.h_gradient
        for e in sphere_directions(4, 6, seed=21):
            d = e - (e @ g) * g / float(g @ g) if float(g @ g) > 1e-20 else e
            norm = np.linalg.norm(d)
            if norm < 1e-12:
                continue
            d = d / norm
            rec = analyze_direction_pair(a, xi0, d)
            assert abs(rec.trace) <= 1e-8 * max(1.0, report.sigma0)

    def test_trace_equals_gradient_pairing_for_arbitrary_directions(self):
        a, xi0 = random_instance(37)
        report = level_function_report(a, xi0)
        for d in sphere_directions(4, 6, seed=22):
            rec = analyze_direction_pair(a, xi0, d)
            assert rec.trace == pytest.approx(float(report.h_gradient @ d), abs=1e-8)

    def test_sigma_chain_is_monotone(self):
        # the ordered singular values below the critical index stay ordered
        a, xi0 = random_instance(43)
        fam = q_family(a)
        k = critical_index(3)
        for scale in (0.0, 0.5, 1.0):
            sig = sv_decomposition(fam.evaluate(scale * xi0)).sigma
            assert np.all(np.diff(sig) <= 1e-12)
            assert sig[k - 1] >= sig[k] - 1e-12


class TestCoarseMaximize:
    def test_finds_a_candidate_and_classifies_it(self):
        a = first_order_flat_matrix()
        xi = coarse_maximize(a, radius=0.3, grid_points=3, refine_iters=10)
        assert xi.shape == (4,)
        analysis = classify_critical_point(a, xi, sphere_directions(4, 4, seed=1))
        assert analysis.sigma0 > 0.5

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            coarse_maximize(first_order_flat_matrix(), radius=-1.0)
