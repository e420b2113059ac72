"""Hastings-McLeod table, Tracy-Widom GOE, and the Lax-pair edge law."""

import math

import numpy as np
import pytest

from spikedwishart.airy import airy_many
from spikedwishart.errors import InputDomainError
from spikedwishart.painleve import (
    lax_propagate,
    pde_residual,
    solve_hastings_mcleod,
    spiked_edge_cdf,
    tw_goe_cdf,
    tw_goe_cdf_callable,
)

HM_Q0 = 0.3670615515480784  # Hastings-McLeod value at the origin


class TestTable:
    def test_airy_boundary_match(self, hm_table):
        ai = airy_many(hm_table.s_max)[0]
        assert hm_table.q[-1] / ai == pytest.approx(1.0, abs=1e-6)

    def test_q_at_origin(self, hm_table):
        i0 = np.argmin(np.abs(hm_table.s))
        assert hm_table.q[i0] == pytest.approx(HM_Q0, abs=2e-9)

    def test_halved_step_richardson(self, hm_table):
        fine = solve_hastings_mcleod(h_s=0.0025)
        for target in (0.0, -5.0, -11.0):
            i0 = np.argmin(np.abs(hm_table.s - target))
            j0 = np.argmin(np.abs(fine.s - target))
            assert abs(hm_table.q[i0] - fine.q[j0]) < 1e-7

    def test_left_end_matches_asymptotic(self, hm_table):
        t = -hm_table.s_min
        expansion = math.sqrt(t / 2.0) * (1.0 - (1.0 / 8.0) / t**3 - (73.0 / 128.0) / t**6)
        assert hm_table.q[0] == pytest.approx(expansion, abs=1e-6)

    def test_q_positive_and_tail_behavior(self, hm_table):
        assert np.all(hm_table.q > 0)
        assert 1.0 - hm_table.E[-1] < 1e-6
        assert 1.0 - hm_table.F[-1] < 1e-6
        right = hm_table.s >= 0
        assert np.all(np.diff(hm_table.q[right]) < 0)

    def test_ef_monotone_unit_interval(self, hm_table):
        for arr in (hm_table.E, hm_table.F):
            assert np.all(arr > 0) and np.all(arr <= 1.0 + 1e-12)
            assert np.all(np.diff(arr) >= 0)

    def test_preconditions(self):
        with pytest.raises(InputDomainError):
            solve_hastings_mcleod(s_max=6.0)
        with pytest.raises(InputDomainError):
            solve_hastings_mcleod(s_min=-8.0)
        with pytest.raises(InputDomainError):
            solve_hastings_mcleod(h_s=0.02)

    def test_csv_roundtrip(self, hm_table, tmp_path):
        path = tmp_path / "table.csv"
        hm_table.to_csv(path)
        loaded = type(hm_table).from_csv(path)
        np.testing.assert_allclose(loaded.q, hm_table.q, rtol=1e-15)
        np.testing.assert_allclose(loaded.F, hm_table.F, rtol=1e-15)


class TestTwGoe:
    def test_square_equals_ef_product(self, hm_table):
        vals = np.atleast_1d(tw_goe_cdf(hm_table, hm_table.s))
        np.testing.assert_allclose(vals**2, hm_table.E * hm_table.F, atol=1e-12)

    def test_limits_and_monotonicity(self, hm_table):
        vals = np.atleast_1d(tw_goe_cdf(hm_table, hm_table.s))
        assert vals[0] < 1e-12 and vals[-1] > 1.0 - 1e-6
        assert np.all(np.diff(vals) >= -1e-14)

    def test_moments_against_known_values(self, hm_table):
        s = hm_table.s
        cdf = np.atleast_1d(tw_goe_cdf(hm_table, s))
        pdf = np.gradient(cdf, s)
        mean = float(np.trapezoid(s * pdf, s))
        median = float(np.interp(0.5, cdf, s))
        assert mean == pytest.approx(-1.2065335746, abs=2e-4)
        assert median == pytest.approx(-1.2681, abs=2e-3)

    def test_out_of_range_raises(self, hm_table):
        with pytest.raises(InputDomainError):
            tw_goe_cdf(hm_table, hm_table.s_max + 1.0)

    def test_clamped_callable(self, hm_table):
        cdf = tw_goe_cdf_callable(hm_table)
        assert cdf(hm_table.s_min - 5.0) == 0.0
        assert cdf(hm_table.s_max + 5.0) == 1.0


class TestLaxPair:
    def test_initial_condition(self, hm_table):
        i0 = np.argmin(np.abs(hm_table.s - 0.5))
        s0 = float(hm_table.s[i0])
        f, g = lax_propagate(hm_table, s0, 0.0)
        assert f == pytest.approx(hm_table.E[i0], rel=1e-12)
        assert g == pytest.approx(hm_table.E[i0], rel=1e-12)

    def test_decoupled_limit_at_the_airy_tail(self, hm_table):
        # with q essentially zero the system is diagonal: f stays put and
        # g evolves by exp(w^3/3 - s w)
        s0 = hm_table.s_max
        e0 = hm_table.E[-1]
        w = 0.8
        f, g = lax_propagate(hm_table, s0, w)
        assert f == pytest.approx(e0, rel=1e-8)
        assert g == pytest.approx(e0 * math.exp(w**3 / 3.0 - s0 * w), rel=1e-5)

    def test_linearity_of_propagation(self, hm_table):
        from spikedwishart.painleve import _lax_scaled, _table_eval

        s = np.array([0.5])
        q, qp, e0, _ = _table_eval(hm_table, s)
        f1, g1, l1 = _lax_scaled(q, qp, s, e0, 1.3)
        f2, g2, l2 = _lax_scaled(q, qp, s, 2.0 * e0, 1.3)
        assert 2.0 * f1[0] * math.exp(l1[0]) == pytest.approx(f2[0] * math.exp(l2[0]), rel=1e-10)
        assert 2.0 * g1[0] * math.exp(l1[0]) == pytest.approx(g2[0] * math.exp(l2[0]), rel=1e-10)


class TestSpikedEdge:
    def test_w0_identity_on_grid(self, hm_table):
        lhs = np.atleast_1d(spiked_edge_cdf(hm_table, hm_table.s, 0.0))
        rhs = np.atleast_1d(tw_goe_cdf(hm_table, hm_table.s))
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    @pytest.mark.parametrize("w", [-1.0, 1.0])
    def test_monotone_cdf(self, hm_table, w):
        vals = np.atleast_1d(spiked_edge_cdf(hm_table, hm_table.s, w))
        assert np.all(np.diff(vals) >= -1e-9)
        assert vals[0] < 1e-6 and vals[-1] > 1.0 - 1e-4

    def test_strong_negative_w_suppression(self, hm_table):
        assert spiked_edge_cdf(hm_table, 0.0, -8.0) < 1e-2

    def test_values_within_unit_interval(self, hm_table):
        for w in (-3.0, -0.5, 0.7, 2.0):
            vals = np.atleast_1d(spiked_edge_cdf(hm_table, hm_table.s, w))
            assert np.all(vals >= 0.0) and np.all(vals <= 1.0)


class TestPdeResidual:
    def test_constant_field_zero_residual(self):
        xg = np.arange(-1.0, 1.0 + 1e-9, 0.05)
        wg = np.arange(-1.0, 1.0 + 1e-9, 0.05)
        field = np.ones((xg.size, wg.size))
        res = pde_residual(field, xg, wg, 4.0)
        np.testing.assert_allclose(res, 0.0, atol=1e-14)

    def test_linear_in_x_field_unit_residual(self):
        xg = np.arange(-1.0, 1.0 + 1e-9, 0.05)
        wg = np.arange(-1.0, 1.0 + 1e-9, 0.05)
        field = np.broadcast_to(xg[:, None], (xg.size, wg.size)).copy()
        res = pde_residual(field, xg, wg, 4.0)
        np.testing.assert_allclose(res, 1.0, atol=1e-12)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InputDomainError):
            pde_residual(np.ones((3, 3)), np.arange(4.0), np.arange(3.0), 4.0)
