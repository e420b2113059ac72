"""Sampler laws against closed forms, dense-matrix oracles, and each other."""

import math

import numpy as np
import pytest
from scipy import stats as sp_stats

from spikedwishart.errors import InputDomainError
from spikedwishart.linalg import SpectrumSample
from spikedwishart.sampling import (
    RobinSAOConfig,
    SpikeConfig,
    default_sao_config,
    goe_edge_scaled_samples,
    rank_one_update,
    sample_bidiagonal,
    sample_gamma,
    sample_multi_spike,
    sample_multi_spike_spectra,
    sample_pencil,
    sample_pencil_pair_spectra,
    sample_secular_pair,
    sample_secular_spectra,
    sample_spiked_spectra,
    sample_stochastic_airy,
    sao_smallest_eigenvalues,
    spectrum_from_bidiagonal,
    tridiag_from_bidiagonal,
)
from spikedwishart.stats import ks_one_sample, ks_two_sample


class TestGamma:
    def test_mean_and_variance(self, rng):
        draws = np.array([sample_gamma(3.0, 2.0, rng) for _ in range(20000)])
        se_mean = draws.std() / math.sqrt(draws.size)
        assert abs(draws.mean() - 6.0) < 3.0 * se_mean
        assert abs(draws.var() - 12.0) < 0.8

    def test_chi_square_4_matches_closed_form(self, rng):
        beta, n = 1.0, 4.0
        draws = np.sort(rng.gamma(beta * n / 2.0, 2.0, size=4000))
        res = ks_one_sample(draws, sp_stats.chi2(4).cdf)
        assert res.p_value > 0.001

    def test_rejects_bad_parameters(self, rng):
        with pytest.raises(InputDomainError):
            sample_gamma(0.0, 1.0, rng)
        with pytest.raises(InputDomainError):
            sample_gamma(1.0, -2.0, rng)


def _dense_spiked(beta, n, N, b, rng, size):
    """Dense Gaussian-matrix oracle for beta in {1, 2}, small N only."""
    out = np.empty((size, N))
    for i in range(size):
        if beta == 1:
            x = rng.standard_normal((n, N))
        else:
            x = rng.standard_normal((n, N)) + 1j * rng.standard_normal((n, N))
        x[:, 0] *= math.sqrt(b)
        out[i] = np.sort(np.linalg.eigvalsh(x.conj().T @ x).real)[::-1]
    return out


class TestBidiagonal:
    def test_corner_entry_second_moment(self, rng):
        cfg = SpikeConfig(beta=2.0, n=5.0, N=3, spikes=(1.7,))
        sq = np.array([sample_bidiagonal(cfg, rng).x[0] ** 2 for _ in range(8000)])
        target = 1.7 * 2.0 * 5.0
        assert abs(sq.mean() - target) < 3.0 * sq.std() / math.sqrt(sq.size)

    @pytest.mark.parametrize("beta,n,N,b", [(1, 8, 4, 1.0), (1, 8, 4, 2.5), (2, 5, 3, 1.8)])
    def test_matches_dense_oracle(self, beta, n, N, b):
        sampler_rng = np.random.default_rng(314)
        oracle_rng = np.random.default_rng(2718)
        cfg = SpikeConfig(beta=beta, n=n, N=N, spikes=(b,))
        mine = sample_spiked_spectra(cfg, sampler_rng, 4000)
        ref = _dense_spiked(beta, n, N, b, oracle_rng, 4000)
        for idx in range(N):
            res = ks_two_sample(np.sort(mine[:, idx]), np.sort(ref[:, idx]))
            assert res.p_value > 0.001, f"marginal {idx}: D={res.statistic}"

    def test_requires_positive_dof(self):
        with pytest.raises(InputDomainError):
            sample_bidiagonal(SpikeConfig(beta=1.0, n=2.0, N=4, spikes=(1.0,)), np.random.default_rng(0))


class TestSpectrumFromBidiagonal:
    def test_single_site(self, rng):
        cfg = SpikeConfig(beta=2.0, n=3.0, N=1, spikes=(2.0,))
        m = sample_bidiagonal(cfg, rng)
        spec = spectrum_from_bidiagonal(m)
        assert spec.values[0] == pytest.approx(m.x[0] ** 2, rel=1e-12)

    def test_two_by_two_closed_form(self, rng):
        cfg = SpikeConfig(beta=1.0, n=4.0, N=2, spikes=(1.5,))
        m = sample_bidiagonal(cfg, rng)
        diag, off = tridiag_from_bidiagonal(m)
        mid = 0.5 * (diag[0] + diag[1])
        rad = math.sqrt(0.25 * (diag[0] - diag[1]) ** 2 + off[0] ** 2)
        spec = spectrum_from_bidiagonal(m)
        np.testing.assert_allclose(spec.values, [mid + rad, mid - rad], rtol=1e-12)

    def test_mean_largest_eigenvalue_null_case(self):
        # frozen from a 2e4-draw run: 136.69 +- 0.08; the asymptotic edge in
        # these units is beta (sqrt n + sqrt N)^2 = 160, approached from
        # below by the order-N^{-1/3} edge fluctuation shift
        cfg = SpikeConfig(beta=2.0, n=20.0, N=20, spikes=(1.0,))
        lam = sample_spiked_spectra(cfg, np.random.default_rng(1234), 4000, top_k=1)[:, 0]
        assert abs(lam.mean() - 136.7) < 2.0


class TestRankOneUpdate:
    def test_single_pole_closed_form(self, rng):
        y = SpectrumSample(values=[4.0])
        state = rng.bit_generator.state
        out = rank_one_update(y, b=1.5, zero_shape=0.0, beta=2.0, rng=rng)
        rng.bit_generator.state = state
        q = rng.gamma(1.0, 2.0, size=(1, 1))[0, 0]
        assert out.values[0] == pytest.approx(4.0 + 1.5 * q, rel=1e-12)

    def test_trace_identity(self, rng):
        for _ in range(40):
            y_vals = np.sort(rng.gamma(3.0, 2.0, size=6))[::-1]
            y = SpectrumSample(values=y_vals)
            state = rng.bit_generator.state
            out = rank_one_update(y, b=2.5, zero_shape=1.5, beta=1.0, rng=rng)
            rng.bit_generator.state = state
            q = rng.gamma(0.5, 2.0, size=(1, 6)).sum()
            q0 = rng.gamma(1.5, 2.0)
            lhs = out.values.sum()
            rhs = y_vals.sum() + 2.5 * (q + q0)
            assert abs(lhs - rhs) <= 1e-9 * (1.0 + abs(rhs))

    def test_interlacing_always(self, rng):
        for _ in range(200):
            y_vals = np.sort(rng.gamma(2.0, 2.0, size=5))[::-1]
            out = rank_one_update(SpectrumSample(values=y_vals), b=1.8, zero_shape=0.7, beta=2.0, rng=rng)
            x = out.values
            assert x[0] > y_vals[0]
            assert np.all(x[1:-1] > y_vals[1:]) and np.all(x[1:-1] < y_vals[:-1])
            assert 0.0 < x[-1] < y_vals[-1]


class TestSecularPair:
    def test_interlacing_and_lengths(self, rng):
        cfg = SpikeConfig(beta=1.0, n=8.0, N=5, spikes=(2.5,))
        pair = sample_secular_pair(cfg, rng)
        assert len(pair.x) == 5 and len(pair.y) == 4

    def test_beta4_mode_lengths(self, rng):
        cfg = SpikeConfig(beta=4.0, n=4.5, N=5, spikes=(2.0,))
        pair = sample_secular_pair(cfg, rng)
        assert len(pair.x) == 5 and len(pair.y) == 5

    def test_y_marginal_matches_null_law(self):
        # n >= N mode draws y from the null ensemble at (n, N-1) by
        # construction; compare the 2-D ordered histogram against the
        # unnormalized joint density on a grid
        beta, n, N = 2.0, 6.0, 3
        cfg = SpikeConfig(beta=beta, n=n, N=N, spikes=(1.5,))
        rng = np.random.default_rng(777)
        ys = np.array([sample_secular_pair(cfg, rng).y.values for _ in range(4000)])
        a = beta * (n - (N - 1) + 1) / 2.0 - 1.0

        def density(y1, y2):
            return (y1 * y2) ** a * np.exp(-(y1 + y2) / 2.0) * (y1 - y2) ** beta

        hi = np.quantile(ys[:, 0], 0.999) * 1.3
        grid = np.linspace(0.0, hi, 400)
        yy1, yy2 = np.meshgrid(grid, grid, indexing="ij")
        mask = yy1 > yy2
        dens = np.where(mask, density(np.maximum(yy1, 1e-12), np.maximum(yy2, 1e-12)), 0.0)
        cell = (grid[1] - grid[0]) ** 2
        total = dens.sum() * cell
        edges = np.quantile(ys[:, 0], [0.0, 0.25, 0.5, 0.75, 1.0])
        edges[0], edges[-1] = 0.0, hi
        chi2 = 0.0
        n_cells = 0
        for i in range(4):
            for j in range(4):
                sel = (
                    (ys[:, 0] >= edges[i])
                    & (ys[:, 0] < edges[i + 1])
                    & (ys[:, 1] >= edges[j] if j else ys[:, 1] >= 0)
                    & (ys[:, 1] < edges[j + 1])
                )
                g_sel = (
                    (yy1 >= edges[i])
                    & (yy1 < edges[i + 1])
                    & (yy2 >= edges[j])
                    & (yy2 < edges[j + 1])
                )
                expected = dens[g_sel].sum() * cell / total * ys.shape[0]
                if expected < 8.0:
                    continue
                chi2 += (sel.sum() - expected) ** 2 / expected
                n_cells += 1
        crit = sp_chi2_isf(0.001, max(n_cells - 1, 1))
        assert chi2 < crit, f"chi2={chi2:.1f} crit={crit:.1f} cells={n_cells}"

    def test_beta4_pooled_is_orthogonal_ensemble(self):
        # at b = 2 the pooled (x, y) points follow the 2N-point
        # orthogonal-weight ensemble e^{-lam/4}, realized as twice a null
        # beta = 1 model with matching power
        N = 4
        cfg = SpikeConfig(beta=4.0, n=N - 0.5, N=N, spikes=(2.0,))
        rng = np.random.default_rng([1, 0])
        pooled = []
        for _ in range(5000):
            pair = sample_secular_pair(cfg, rng)
            pooled.append(np.concatenate([pair.x.values, pair.y.values]))
        pooled = np.sort(np.array(pooled), axis=1)[:, ::-1]
        oracle_cfg = SpikeConfig(beta=1.0, n=2 * N + 1.0, N=2 * N, spikes=(1.0,))
        oracle = 2.0 * sample_spiked_spectra(oracle_cfg, np.random.default_rng([1, 1]), 5000)
        for idx in (0, 3, 7):
            res = ks_two_sample(np.sort(pooled[:, idx]), np.sort(oracle[:, idx]))
            assert res.p_value > 0.001, f"pooled marginal {idx}"
        res = ks_two_sample(np.sort(pooled.ravel()), np.sort(oracle.ravel()))
        assert res.p_value > 0.001


def sp_chi2_isf(alpha: float, df: int) -> float:
    return float(sp_stats.chi2(df).isf(alpha))


class TestMultiSpike:
    def test_unit_spikes_reduce_to_null(self):
        cfg = SpikeConfig(beta=2.0, n=5.0, N=5, spikes=(1.0,) * 5)
        ms = sample_multi_spike_spectra(cfg, np.random.default_rng(11), 4000)
        null_cfg = SpikeConfig(beta=2.0, n=5.0, N=5, spikes=(1.0,))
        null = sample_spiked_spectra(null_cfg, np.random.default_rng(12), 4000)
        for idx in (0, 2, 4):
            res = ks_two_sample(np.sort(ms[:, idx]), np.sort(null[:, idx]))
            assert res.p_value > 0.001

    def test_single_step_mean(self, rng):
        cfg = SpikeConfig(beta=2.0, n=6.0, N=1, spikes=(3.0,))
        draws = np.array([sample_multi_spike(cfg, rng).values[0] for _ in range(4000)])
        target = 3.0 * 2.0 * 6.0  # b * E[Gamma(beta n / 2, 2)]
        assert abs(draws.mean() - target) < 4.0 * draws.std() / math.sqrt(draws.size)

    def test_requires_one_spike_per_step(self, rng):
        with pytest.raises(InputDomainError):
            sample_multi_spike(SpikeConfig(beta=1.0, n=6.0, N=3, spikes=(1.0, 2.0)), rng)


class TestPencil:
    def test_first_entry_mean(self, rng):
        beta, n, N, b = 1.0, 7.0, 4, 2.0
        cfg = SpikeConfig(beta=beta, n=n, N=N, spikes=(b,))
        alpha0 = beta * (n - N + 1) / 2.0 - 1.0
        draws = np.array([sample_pencil(cfg, rng).a[0] for _ in range(6000)])
        target = 2.0 * ((N - 1) * beta / 2.0 + alpha0 + 1.0)
        assert abs(draws.mean() - target) < 4.0 * draws.std() / math.sqrt(draws.size)

    def test_single_site_law(self):
        # with one site the lone zero is the corner entry, a b-scaled gamma
        # variate of shape beta n / 2 (the same law as the spiked ensemble)
        beta, n, b = 2.0, 3.0, 1.8
        cfg = SpikeConfig(beta=beta, n=n, N=1, spikes=(b,))
        rng = np.random.default_rng(5150)
        draws = np.sort([sample_pencil(cfg, rng).a[0] for _ in range(4000)])
        res = ks_one_sample(draws, sp_stats.gamma(beta * n / 2.0, scale=2.0 * b).cdf)
        assert res.p_value > 0.001

    def test_pair_zeros_match_secular_pair(self):
        beta, n, N, b = 1.0, 7.0, 4, 2.0
        cfg = SpikeConfig(beta=beta, n=n, N=N, spikes=(b,))
        zn, znm1 = sample_pencil_pair_spectra(cfg, np.random.default_rng(21), 4000)
        rng = np.random.default_rng(22)
        xs, ys = [], []
        for _ in range(4000):
            pair = sample_secular_pair(cfg, rng)
            xs.append(pair.x.values)
            ys.append(pair.y.values)
        xs, ys = np.array(xs), np.array(ys)
        for idx in range(N):
            res = ks_two_sample(np.sort(zn[:, idx]), np.sort(xs[:, idx]))
            assert res.p_value > 0.001, f"x marginal {idx}"
        for idx in range(N - 1):
            res = ks_two_sample(np.sort(znm1[:, idx]), np.sort(ys[:, idx]))
            assert res.p_value > 0.001, f"y marginal {idx}"


class TestStochasticAiry:
    def test_deterministic_ground_state(self):
        cfg = RobinSAOConfig(beta=math.inf, w=math.inf, L=20.0, h=0.01, k=2)
        vals = sao_smallest_eigenvalues(cfg, None, 1)[0]
        assert vals[0] == pytest.approx(2.3381074104597670, abs=5e-4)
        assert vals[1] == pytest.approx(4.0879494441309706, abs=5e-4)

    def test_beta1_dirichlet_matches_tw_goe(self, hm_table):
        from spikedwishart.painleve import tw_goe_cdf_callable

        cfg = default_sao_config(beta=1.0, w=math.inf)
        vals = sao_smallest_eigenvalues(cfg, np.random.default_rng(42), 2500)
        res = ks_one_sample(np.sort(-vals[:, 0]), tw_goe_cdf_callable(hm_table))
        assert res.p_value > 0.001

    def test_coarse_grid_warns(self):
        with pytest.warns(UserWarning):
            RobinSAOConfig(beta=1.0, w=0.0, L=12.0, h=0.6, k=1)

    def test_single_draw_shape(self, rng):
        cfg = default_sao_config(beta=2.0, w=0.5, k=3)
        vals = sample_stochastic_airy(cfg, rng)
        assert vals.shape == (3,)
        assert np.all(np.diff(vals) > 0)


class TestDeterminism:
    def test_identical_seeds_identical_outputs(self):
        cfg = SpikeConfig(beta=2.0, n=6.0, N=4, spikes=(1.5,))
        a = sample_spiked_spectra(cfg, np.random.default_rng([9, 1]), 50)
        b = sample_spiked_spectra(cfg, np.random.default_rng([9, 1]), 50)
        np.testing.assert_array_equal(a, b)
        c = sample_secular_spectra(cfg, np.random.default_rng([9, 2]), 50)
        d = sample_secular_spectra(cfg, np.random.default_rng([9, 2]), 50)
        np.testing.assert_array_equal(c, d)


class TestGoeEdge:
    def test_scaled_mean_near_limit(self):
        s = goe_edge_scaled_samples(200, np.random.default_rng(3), 2000)
        assert abs(s.mean() + 1.2065) < 0.2
