import math

import numpy as np
import pytest
from scipy import stats

from betadom import ensembles as ens
from betadom.errors import ParameterError
from betadom.rng import RngStream
from betadom.stats import one_sample_ks, two_sample_ks
from betadom.tridiag import extremal_eigenvalue, top_eigenvector

ALPHA = 1e-3


class TestHermite:
    def test_one_by_one(self):
        s = ens.sample_hermite(1, 2.0, RngStream(1))
        assert s.offdiag.size == 0
        assert s.largest() == s.diag[0]
        assert s.lambda1() == pytest.approx(s.diag[0] / math.sqrt(2.0))

    def test_trace_identity(self):
        for r in range(20):
            s = ens.sample_hermite(2, 0.7, RngStream(2, r))
            dense = np.linalg.eigvalsh(s.tridiagonal().to_dense())
            assert dense.sum() == pytest.approx(s.diag.sum(), abs=1e-12)
            assert s.largest() == pytest.approx(dense[-1], abs=1e-11)

    def test_offdiag_nonnegative_and_dofs(self):
        s = ens.sample_hermite(6, 1.5, RngStream(3))
        assert np.all(s.offdiag >= 0)
        np.testing.assert_allclose(ens._hermite_dofs(6, 1.5), [7.5, 6.0, 4.5, 3.0, 1.5])

    @pytest.mark.slow
    def test_edge_mean_near_tw2(self):
        vals = [
            float(ens.scale_hermite(ens.sample_hermite(200, 2.0, RngStream(4, r)).lambda1(), 200))
            for r in range(2000)
        ]
        assert -2.4 <= np.mean(vals) <= -1.2

    @pytest.mark.parametrize("n,beta", [(0, 1.0), (3, 0.0)])
    def test_bad_parameters(self, n, beta):
        with pytest.raises(ParameterError):
            ens.sample_hermite(n, beta, RngStream(1))


class TestLaguerre:
    def test_one_by_one_is_chi_square(self):
        beta, kappa = 2.0, 1.5
        vals = np.array([ens.sample_laguerre(1, kappa, beta, RngStream(5, r)).lambda1() for r in range(10**5)])
        _, p = one_sample_ks(vals, lambda t: stats.chi2.cdf(beta * t, beta * kappa))
        assert p > ALPHA

    def test_shapes(self):
        s = ens.sample_laguerre(4, 5.0, 1.0, RngStream(6))
        assert s.diag.shape == (4,) and s.subdiag.shape == (3,)

    def test_kappa_constraint(self):
        with pytest.raises(ParameterError):
            ens.sample_laguerre(3, 2.0, 1.0, RngStream(1))

    def test_gram_matches_bidiagonal(self):
        s = ens.sample_laguerre(5, 6.5, 0.5, RngStream(7))
        B = s.bidiagonal()
        np.testing.assert_allclose(s.gram().to_dense(), B.T @ B, atol=1e-12)


class TestCoupleSpecs:
    def test_hermite_beta2_derived(self):
        spec = ens.HermiteCoupleSpec(3, 2, 2)
        assert spec.beta2 == 3.0
        assert spec.m * spec.beta1_exact == spec.n * spec.beta2_exact
        hi, lo = spec.coupled_dofs()
        np.testing.assert_array_equal(hi, [4.0])
        np.testing.assert_array_equal(lo, [3.0])

    def test_hermite_rational_beta(self):
        spec = ens.HermiteCoupleSpec(7, 3, "1/3")
        assert spec.beta2_exact * 3 == 7 * spec.beta1_exact

    def test_hermite_orientation(self):
        with pytest.raises(ParameterError):
            ens.HermiteCoupleSpec(2, 3, 1.0)

    def test_laguerre_dofs(self):
        spec = ens.LaguerreCoupleSpec(4, 2, 3, 1)
        dh, dl, sh, sl = spec.coupled_dofs()
        np.testing.assert_array_equal(dh, [6, 5])
        np.testing.assert_array_equal(dl, [6, 4])
        np.testing.assert_array_equal(sh, [3])
        np.testing.assert_array_equal(sl, [2])

    def test_laguerre_kappa_constraints(self):
        with pytest.raises(ParameterError):
            ens.LaguerreCoupleSpec(4, 2, 1, 1)


class TestCoupledHermite:
    def test_equal_betas_give_equal_matrices(self):
        pair = ens.sample_coupled_hermite(ens.HermiteCoupleSpec(4, 4, 1.5), RngStream(8))
        np.testing.assert_array_equal(pair.upper.diag, pair.lower.diag)
        np.testing.assert_array_equal(pair.upper.offdiag, pair.lower.offdiag)

    def test_corner_entries_dominate(self):
        spec = ens.HermiteCoupleSpec(3, 2, 2)
        for r in range(2000):
            pair = ens.sample_coupled_hermite(spec, RngStream(9, r))
            assert pair.upper.offdiag[0] >= pair.lower.offdiag[0]
            np.testing.assert_array_equal(pair.upper.diag[:2], pair.lower.diag)

    @pytest.mark.parametrize("m,n,beta1", [(3, 2, 2), (7, 3, 0.5), (20, 11, 1.0)])
    def test_pathwise_domination_and_witness(self, m, n, beta1):
        spec = ens.HermiteCoupleSpec(m, n, beta1)
        for r in range(300):
            pair = ens.sample_coupled_hermite(spec, RngStream(10, r))
            up, lo = pair.upper.tridiagonal(), pair.lower.tridiagonal()
            lam_lo = extremal_eigenvalue(lo)
            corner = extremal_eigenvalue(up.corner(n))
            assert corner <= extremal_eigenvalue(up) + 1e-10
            assert corner >= lam_lo - 1e-10
            v = top_eigenvector(lo, lam_lo)
            assert np.all(v >= 0)
            assert up.corner(n).quadratic_form(v) >= lo.quadratic_form(v) - 1e-10

    @pytest.mark.slow
    def test_marginals(self):
        spec = ens.HermiteCoupleSpec(3, 2, 2)
        N = 20000
        pairs = np.array([ens.sample_coupled_hermite(spec, RngStream(11, r)).largest_pair() for r in range(N)])
        direct_up = [ens.sample_hermite(3, 2.0, RngStream(12, r)).largest() for r in range(N)]
        direct_lo = [ens.sample_hermite(2, 3.0, RngStream(13, r)).largest() for r in range(N)]
        assert two_sample_ks(pairs[:, 0], direct_up)[1] > ALPHA
        assert two_sample_ks(pairs[:, 1], direct_lo)[1] > ALPHA


class TestCoupledLaguerre:
    def test_first_diagonal_equal_and_domination(self):
        spec = ens.LaguerreCoupleSpec(4, 2, 3, 1)
        for r in range(2000):
            pair = ens.sample_coupled_laguerre(spec, RngStream(14, r))
            assert pair.upper.diag[0] == pair.lower.diag[0]
            assert np.all(pair.upper.diag[:2] >= pair.lower.diag)
            assert pair.upper.subdiag[0] >= pair.lower.subdiag[0]
            hi, lo = pair.largest_pair()
            assert hi >= lo - 1e-10

    def test_gram_corner_witness(self):
        spec = ens.LaguerreCoupleSpec(6, 4, "4.5", "0.75")
        for r in range(300):
            pair = ens.sample_coupled_laguerre(spec, RngStream(15, r))
            up, lo = pair.upper.gram(), pair.lower.gram()
            v = top_eigenvector(lo)
            assert np.all(v >= 0)
            assert up.corner(4).quadratic_form(v) >= lo.quadratic_form(v) - 1e-10

    @pytest.mark.slow
    def test_marginals(self):
        spec = ens.LaguerreCoupleSpec(4, 2, 3, 1)
        N = 20000
        pairs = np.array([ens.sample_coupled_laguerre(spec, RngStream(16, r)).largest_pair() for r in range(N)])
        direct_up = [ens.sample_laguerre(4, 6.0, 1.0, RngStream(17, r)).largest() for r in range(N)]
        direct_lo = [ens.sample_laguerre(2, 3.0, 2.0, RngStream(18, r)).largest() for r in range(N)]
        assert two_sample_ks(pairs[:, 0], direct_up)[1] > ALPHA
        assert two_sample_ks(pairs[:, 1], direct_lo)[1] > ALPHA


class TestScaling:
    def test_hermite_centering(self):
        assert ens.scale_hermite(2 * math.sqrt(9), 9) == pytest.approx(0.0, abs=1e-14)

    def test_hermite_values(self):
        assert ens.scale_hermite(3.0, 1) == pytest.approx(1.0)
        assert ens.scale_hermite(0.0, 4) == pytest.approx(-2 * 4 ** (2 / 3))
        assert ens.scale_hermite(0.0, 4) == pytest.approx(-5.0397, abs=1e-4)

    def test_laguerre_values(self):
        assert ens.scale_laguerre((math.sqrt(3) + math.sqrt(5)) ** 2, 5, 3.0) == pytest.approx(0.0, abs=1e-13)
        assert ens.scale_laguerre(8.0, 1, 1.0) == pytest.approx(4 ** (1 / 3))

    def test_laguerre_affine_increasing(self):
        xs = np.linspace(0, 50, 11)
        ys = ens.scale_laguerre(xs, 4, 6.0)
        assert np.all(np.diff(ys) > 0)
        np.testing.assert_allclose(np.diff(ys, 2), 0, atol=1e-12)

    def test_errors(self):
        with pytest.raises(ParameterError):
            ens.scale_hermite(1.0, 0)
        with pytest.raises(ParameterError):
            ens.scale_laguerre(1.0, 1, 0.0)


class TestScalingIdentities:
    @pytest.mark.parametrize(
        "spec",
        [
            ens.HermiteCoupleSpec(3, 2, 2),
            ens.HermiteCoupleSpec(5, 5, 1.3),
            ens.LaguerreCoupleSpec(4, 2, 3, 1),
            ens.LaguerreCoupleSpec(3, 3, 4, 2),
        ],
    )
    def test_identities_hold(self, spec):
        report = ens.scaling_identity_check(spec)
        assert report["ok"], report

    def test_laguerre_edge_value(self):
        report = ens.scaling_identity_check(ens.LaguerreCoupleSpec(4, 2, 3, 1))
        assert report["edge"]["lhs"] == pytest.approx((math.sqrt(6) + 2) ** 2, rel=1e-12)
        assert report["edge"]["rhs"] == pytest.approx(2 * (math.sqrt(3) + math.sqrt(2)) ** 2, rel=1e-12)

    def test_scaled_statistics_share_affine_map(self):
        # beta^(2/3) H_{m,beta1} and beta^(2/3) H_{n,beta2} must coincide for equal raw eigenvalues.
        spec = ens.HermiteCoupleSpec(3, 2, 2)
        for raw in (-1.0, 0.5, 4.2):
            up = spec.beta1 ** (2 / 3) * ens.scale_hermite(raw / math.sqrt(spec.beta1), 3)
            lo = spec.beta2 ** (2 / 3) * ens.scale_hermite(raw / math.sqrt(spec.beta2), 2)
            assert up == pytest.approx(lo, rel=1e-12)
