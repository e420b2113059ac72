"""Airy evaluation, kernel quadrature, and the soft-edge densities.

scipy.special supplies the independent oracle for Ai and Ai'; the package
itself never imports scipy.
"""

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import airy as sp_airy

from spikedwishart.airy import (
    ai_integral_above,
    airy,
    airy_kernel,
    airy_many,
    density_blind,
    density_blind_direct,
    density_species_y,
)
from spikedwishart.errors import InputDomainError

AI0 = 0.3550280538878172  # 3^(-2/3) / Gamma(2/3), from the Maclaurin series


class TestAiryValues:
    def test_value_at_zero(self):
        assert airy(0.0).ai == pytest.approx(AI0, abs=1e-15)

    def test_positive_axis_relative_accuracy(self):
        xs = np.linspace(0.0, 40.0, 801)
        ai, aip = airy_many(xs)
        ref_ai, ref_aip, _, _ = sp_airy(xs)
        assert np.max(np.abs(ai / ref_ai - 1.0)) < 1e-12
        assert np.max(np.abs(aip / ref_aip - 1.0)) < 1e-12

    def test_negative_axis_absolute_accuracy(self):
        xs = np.linspace(-40.0, 0.0, 801)
        ai, aip = airy_many(xs)
        ref_ai, ref_aip, _, _ = sp_airy(xs)
        assert np.max(np.abs(ai - ref_ai)) < 1e-10
        assert np.max(np.abs(aip - ref_aip)) < 1e-10

    def test_switchover_overlap_consistency(self):
        # the evaluation methods must agree where their regions overlap
        from spikedwishart.airy import _airy_asym_neg, _airy_asym_pos, _airy_series, _get_tables

        tables = _get_tables()
        xs = np.linspace(2.0, 2.2, 9)
        series = _airy_series(xs)
        table = tables["pos"].eval(xs)
        assert np.max(np.abs(series[0] / table[0] - 1.0)) < 1e-9
        xs = np.linspace(7.8, 8.0, 9)
        asym = _airy_asym_pos(xs)
        table = tables["pos"].eval(xs)
        assert np.max(np.abs(asym[0] / table[0] - 1.0)) < 1e-9
        xs = np.linspace(-2.2, -2.0, 9)
        series = _airy_series(xs)
        table = tables["neg"].eval(xs)
        assert np.max(np.abs(series[0] - table[0])) < 1e-10
        xs = np.linspace(-8.0, -7.8, 9)
        asym = _airy_asym_neg(xs)
        table = tables["neg"].eval(xs)
        assert np.max(np.abs(asym[0] - table[0])) < 1e-9

    def test_positive_and_decreasing(self):
        xs = np.linspace(0.0, 12.0, 200)
        ai = airy_many(xs)[0]
        assert np.all(ai > 0)
        assert np.all(np.diff(ai) < 0)

    def test_ode_residual_spot_checks(self):
        h = 1e-4
        for x in (-7.3, -3.1, 0.4, 1.9, 5.5, 11.2):
            lo, mid, hi = airy_many(np.array([x - h, x, x + h]))[0]
            second = (lo - 2.0 * mid + hi) / (h * h)
            assert second == pytest.approx(x * mid, abs=1e-6)

    def test_domain_guard(self):
        with pytest.raises(InputDomainError):
            airy(41.0)


class TestAiryIntegral:
    def test_value_at_zero_is_third(self):
        assert float(ai_integral_above(0.0)) == pytest.approx(1.0 / 3.0, abs=1e-12)

    @pytest.mark.parametrize("z", [-12.0, -4.5, -1.0, 0.5, 3.0, 8.0])
    def test_against_quadrature(self, z):
        ref = quad(lambda t: sp_airy(t)[0], z, 40.0, limit=400)[0]
        assert float(ai_integral_above(z)) == pytest.approx(ref, abs=1e-10)


class TestAiryKernel:
    def test_symmetry(self):
        assert airy_kernel(-1.3, 0.7) == pytest.approx(airy_kernel(0.7, -1.3), abs=1e-14)

    def test_diagonal_nonnegative(self):
        for x in np.linspace(-10.0, 4.0, 15):
            assert airy_kernel(float(x), float(x)) >= 0.0

    def test_diagonal_closed_form(self):
        for x in np.linspace(-8.0, 4.0, 25):
            ai, aip, _, _ = sp_airy(x)
            closed = aip**2 - x * ai**2
            assert airy_kernel(float(x), float(x)) == pytest.approx(closed, abs=1e-9)

    def test_domain_guard(self):
        with pytest.raises(InputDomainError):
            airy_kernel(-16.0, 0.0)


class TestSoftEdgeDensities:
    def test_species_y_far_right_vanishes(self):
        assert density_species_y(8.0) < 1e-10

    def test_species_y_at_zero(self):
        ai, aip, _, _ = sp_airy(0.0)
        expected = 0.5 * aip**2 - 0.25 * ai * (1.0 / 3.0)
        assert density_species_y(0.0) == pytest.approx(expected, abs=1e-10)

    def test_blind_w0_equals_goe_closed_form(self):
        for x in np.linspace(-6.0, 2.0, 17):
            ai, aip, _, _ = sp_airy(x)
            kernel = aip**2 - x * ai**2
            goe = kernel + 0.5 * ai * (1.0 - quad(lambda t: sp_airy(t)[0], x, 40.0, limit=400)[0])
            assert density_blind(float(x), 0.0) == pytest.approx(goe, abs=1e-8)

    def test_blind_far_right_vanishes(self):
        # dominated by Ai(X)/2, so the decay is Airy-exponential
        assert density_blind(6.0, 0.0) < 1e-4
        assert density_blind(6.0, 0.0) < density_blind(4.0, 0.0) < density_blind(2.0, 0.0)

    def test_blind_nonnegative(self):
        for x in np.linspace(-6.0, 2.0, 9):
            assert density_blind(float(x), -2.0) >= -1e-6

    def test_blind_direct_form_agrees_at_w_minus2(self):
        for x in (-2.0, 0.0):
            ibp = density_blind(x, -2.0)
            direct = density_blind_direct(x, -2.0)
            assert ibp == pytest.approx(direct, abs=2e-3)

    def test_blind_rejects_positive_w(self):
        with pytest.raises(InputDomainError):
            density_blind(0.0, 0.5)

    def test_blind_equals_aware_sum_monte_carlo_w0(self):
        # pooled density = perturbed-species histogram + exact unperturbed
        # density; checked at the critical spike where the closed form holds
        from spikedwishart.sampling import SpikeConfig, _secular_pair_batch

        N, draws = 100, 8000
        cfg = SpikeConfig(beta=4.0, n=N - 0.5, N=N, spikes=(2.0,))
        x_top, y = _secular_pair_batch(cfg, np.random.default_rng([6, 0]), draws, top_k=20)
        center, scale = 16.0 * N, 4.0 * (4.0 * N) ** (1.0 / 3.0)
        edges = np.arange(-4.0, 0.0 + 1e-12, 0.5)
        counts, _ = np.histogram(((x_top - center) / scale).ravel(), bins=edges)
        counts_y, _ = np.histogram(((y[:, :20] - center) / scale).ravel(), bins=edges)
        mids = 0.5 * (edges[:-1] + edges[1:])
        for i, mid in enumerate(mids):
            aware_x = counts[i] / (draws * 0.5)
            blind = density_blind(float(mid), 0.0)
            aware_y = density_species_y(float(mid))
            sigma = np.sqrt(max(counts[i], 1.0)) / (draws * 0.5)
            assert abs(aware_x + aware_y - blind) <= 0.10 * blind + 3.0 * sigma, f"bin {mid}"
            # the unperturbed species histogram against its exact density
            emp_y = counts_y[i] / (draws * 0.5)
            sigma_y = np.sqrt(max(counts_y[i], 1.0)) / (draws * 0.5)
            assert abs(emp_y - aware_y) <= 0.10 * aware_y + 3.0 * sigma_y, f"y bin {mid}"
