import math

import numpy as np
import pytest
from scipy import special

from betadom import stochastic_operator as so
from betadom.errors import ParameterError
from betadom.rng import RngStream
from betadom.stats import two_sample_ks
from betadom.tridiag import extremal_eigenvalue

AIRY_ZERO = -special.ai_zeros(1)[0][0]  # 2.33810741...


class TestGrid:
    def test_points(self):
        g = so.OperatorGrid(0, 1.0, 0.25)
        assert g.N == 4
        np.testing.assert_allclose(g.points, [0.25, 0.5, 0.75])

    def test_round_off_in_count(self):
        assert so.OperatorGrid(0, 20.0, 0.02).size == 999

    @pytest.mark.parametrize("L,h", [(1.0, 1.0), (1.0, 2.0), (1.0, 0.0)])
    def test_degenerate(self, L, h):
        with pytest.raises(ParameterError):
            so.OperatorGrid(0, L, h)

    def test_negative_k(self):
        with pytest.raises(ParameterError):
            so.OperatorGrid(-1, 1.0, 0.1)


class TestNoise:
    def test_k0_weights_are_h(self):
        g = so.OperatorGrid(0, 5.0, 0.1)
        np.testing.assert_allclose(g.cell_weights(), 0.1, rtol=1e-12)

    def test_k1_first_cell(self):
        g = so.OperatorGrid(1, 5.0, 0.1)
        assert g.cell_weights()[0] == pytest.approx(3 * 0.1 ** (1 / 3), rel=1e-14)

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_telescoping_sum(self, k):
        g = so.OperatorGrid(k, 7.0, 0.01)
        v = g.cell_weights()
        assert np.all(v > 0)
        x_last = g.points[-1]
        assert v.sum() == pytest.approx((2 * k + 1) * x_last ** (1 / (2 * k + 1)), rel=1e-10)

    def test_build_noise_shape_and_replay(self):
        g = so.OperatorGrid(1, 3.0, 0.1)
        a, b = so.build_noise(g, RngStream(1, 2)), so.build_noise(g, RngStream(1, 2))
        assert a.g.shape == (g.size,)
        np.testing.assert_array_equal(a.g, b.g)


class TestDiscretize:
    def test_deterministic_airy(self):
        g = so.OperatorGrid(0, 40.0, 0.005)
        assert so.discretize(g, 2.0).smallest() == pytest.approx(AIRY_ZERO, abs=0.02)

    def test_noise_standard_deviation_k0(self):
        g = so.OperatorGrid(0, 10.0, 0.1)
        noise = so.build_noise(g, RngStream(2))
        op = so.discretize(g, 2.0, noise).tridiagonal()
        base = so.discretize(g, 2.0).tridiagonal()
        np.testing.assert_allclose(op.diag - base.diag, math.sqrt(20.0) * noise.g, rtol=1e-12)

    def test_quadrupling_beta_halves_noise(self):
        g = so.OperatorGrid(1, 10.0, 0.05)
        noise = so.build_noise(g, RngStream(3))
        base = so.discretize(g, 1.0).tridiagonal().diag
        d1 = so.discretize(g, 1.0, noise).tridiagonal().diag - base
        d4 = so.discretize(g, 4.0, noise).tridiagonal().diag - base
        np.testing.assert_allclose(d4, d1 / 2, rtol=1e-10, atol=1e-12)

    def test_offdiagonal_constant(self):
        g = so.OperatorGrid(0, 1.0, 0.1)
        T = so.discretize(g, 1.0).tridiagonal()
        np.testing.assert_allclose(T.offdiag, -100.0)

    def test_sample_tw_zero_noise(self):
        g = so.OperatorGrid(0, 40.0, 0.005)
        assert -so.discretize(g, 2.0).smallest() == pytest.approx(-AIRY_ZERO, abs=0.02)

    def test_sample_tw_bad_grid(self):
        with pytest.raises(ParameterError):
            so.sample_tw(so.OperatorGrid(0, 1.0, 2.0), 2.0, RngStream(1))


class TestRescaled:
    def test_p_one_is_identity(self):
        g = so.OperatorGrid(1, 5.0, 0.05)
        noise = so.build_noise(g, RngStream(4))
        a = so.rescaled_operator(g, 2.5, 1.0, noise).tridiagonal()
        b = so.discretize(g, 2.5, noise).tridiagonal()
        np.testing.assert_array_equal(a.diag, b.diag)
        np.testing.assert_array_equal(a.offdiag, b.offdiag)

    def test_deterministic_scaling(self):
        g = so.OperatorGrid(0, 20.0, 0.005)
        lam = so.discretize(g, 1.0).smallest()
        lam_p = so.rescaled_operator(g, 1.0, 2.0, so.zero_noise(g)).smallest()
        assert lam_p == pytest.approx(lam / 2, abs=1e-2)

    @pytest.mark.slow
    def test_distributional_scaling(self):
        g = so.OperatorGrid(0, 20.0, 0.02)
        p = 1.2
        scaled = [p * so.rescaled_operator(g, 2.0, p, so.build_noise(g, RngStream(5, r))).smallest() for r in range(2000)]
        plain = [so.discretize(g, 2.0, so.build_noise(g, RngStream(6, r))).smallest() for r in range(2000)]
        assert two_sample_ks(scaled, plain)[1] > 1e-3


class TestRanges:
    def test_k0(self):
        r = 3.7
        lo, hi = so.alpha_range(0, 1.0, r)
        assert lo == pytest.approx(r ** (1 / 3))
        assert hi == pytest.approx(r ** (2 / 3))

    def test_k1_exponents(self):
        lo, hi = so.alpha_range(1, 1.0, 2.0)
        assert math.log2(lo) == pytest.approx(1 / 7)
        assert math.log2(hi) == pytest.approx(6 / 7)
        assert so.s_range(1) == pytest.approx((1 / 7, 6 / 7))

    def test_equal_betas_degenerate(self):
        assert so.admissible_p_range(2, 1.5, 1.5) == (1.0, 1.0)
        assert so.alpha_range(2, 1.5, 1.5) == (1.0, 1.0)

    def test_order_violation(self):
        with pytest.raises(ParameterError):
            so.admissible_p_range(0, 2.0, 1.0)

    @pytest.mark.parametrize("k", [0, 1, 3])
    def test_endpoints_zero_one_gap_coefficient(self, k):
        lo, hi = so.admissible_p_range(k, 1.0, 3.0)
        lap_hi, pot_hi = so.OperatorCouplingSpec(k, 1.0, 3.0, hi).gap_coefficients()
        lap_lo, pot_lo = so.OperatorCouplingSpec(k, 1.0, 3.0, lo).gap_coefficients()
        assert lap_hi == pytest.approx(0.0, abs=1e-14) and pot_hi > 0
        assert pot_lo == pytest.approx(0.0, abs=1e-14) and lap_lo > 0

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_p_range_maps_onto_alpha_range(self, k):
        p_lo, p_hi = so.admissible_p_range(k, 1.0, 2.0)
        a = sorted(so.OperatorCouplingSpec(k, 1.0, 2.0, p).alpha for p in (p_lo, p_hi))
        np.testing.assert_allclose(a, so.alpha_range(k, 1.0, 2.0), rtol=1e-12)

    @pytest.mark.parametrize("k,s", [(0, 0.5), (1, 0.3), (2, 0.8)])
    def test_from_s(self, k, s):
        spec = so.OperatorCouplingSpec.from_s(k, 1.0, 2.5, s)
        assert spec.s == pytest.approx(s, rel=1e-12)


class TestOrderingGap:
    def test_positive_at_p_one(self):
        spec = so.OperatorCouplingSpec(0, 2.0, 4.0, 1.0)
        assert spec.gamma == pytest.approx(math.sqrt(2))
        lap, pot = spec.gap_coefficients()
        assert lap > 0 and pot > 0
        assert extremal_eigenvalue(so.ordering_gap(spec, so.OperatorGrid(0, 20, 0.02)), "smallest") > 0

    def test_p_equals_gamma_gives_diagonal(self):
        lo, hi = so.admissible_p_range(0, 2.0, 4.0)
        spec = so.OperatorCouplingSpec(0, 2.0, 4.0, hi)
        T = so.ordering_gap(spec, so.OperatorGrid(0, 20, 0.02))
        assert np.abs(T.offdiag).max() < 1e-9
        assert extremal_eigenvalue(T, "smallest", so.EIG_TOL) >= 0

    @pytest.mark.parametrize("k", [0, 1])
    def test_matches_operator_difference(self, k):
        g = so.OperatorGrid(k, 20.0, 0.02)
        noise = so.build_noise(g, RngStream(7))
        for p in np.linspace(*so.admissible_p_range(k, 2.0, 4.0), 4):
            spec = so.OperatorCouplingSpec(k, 2.0, 4.0, float(p))
            lower, upper = so.coupled_operators(spec, g, noise)
            diff_d = upper.tridiagonal().diag - lower.tridiagonal().diag
            diff_o = upper.tridiagonal().offdiag - lower.tridiagonal().offdiag
            gap = so.ordering_gap(spec, g)
            scale = upper.tridiagonal().norm_inf()
            np.testing.assert_allclose(diff_d, gap.diag, rtol=0, atol=1e-12 * scale)
            np.testing.assert_allclose(diff_o, gap.offdiag, rtol=0, atol=1e-12 * scale)

    @pytest.mark.parametrize("k,b1,b2", [(0, 1.0, 2.0), (1, 0.5, 3.0), (2, 1.0, 7.0)])
    def test_noise_cancels(self, k, b1, b2):
        g = so.OperatorGrid(k, 5.0, 0.05)
        noise = so.build_noise(g, RngStream(8))
        for p in np.linspace(*so.admissible_p_range(k, b1, b2), 5):
            lower, upper = so.coupled_operators(so.OperatorCouplingSpec(k, b1, b2, float(p)), g, noise)
            assert abs((upper - lower).noise_coef) <= 4 * np.finfo(float).eps * lower.noise_coef


class TestCoupledPair:
    def test_equal_betas(self):
        g = so.OperatorGrid(0, 10.0, 0.05)
        a, b = so.coupled_tw_pair(so.OperatorCouplingSpec(0, 2.0, 2.0, 1.0), g, RngStream(9))
        assert a == b

    @pytest.mark.parametrize("k,b1,b2", [(0, 2.0, 4.0), (1, 1.0, 2.0)])
    def test_pathwise_order(self, k, b1, b2):
        g = so.OperatorGrid(k, 20.0, 0.02)
        p_mid = float(np.mean(so.admissible_p_range(k, b1, b2)))
        spec = so.OperatorCouplingSpec(k, b1, b2, p_mid)
        for r in range(100):
            lo, hi = so.coupled_tw_pair(spec, g, RngStream(10, r))
            assert hi >= lo - 1e-9

    def test_out_of_range_rejected(self):
        g = so.OperatorGrid(0, 5.0, 0.1)
        with pytest.raises(ParameterError):
            so.coupled_tw_pair(so.OperatorCouplingSpec(0, 1.0, 8.0, 5.0), g, RngStream(1))
