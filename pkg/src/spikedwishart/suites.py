"""Named verification suites binding samplers to their exact laws.

Each suite returns a JSON-friendly report with a boolean "passed" plus
enough detail to audit the decision.  The soft-edge suites compare spiked
beta = 4 Wishart samples at

    b = 2 - 2^{1/3} w / N^{1/3},   n = N - 1 + 2/beta,

scaled as s = (lam_max - 16 N) / (4 (4N)^{1/3}), against the Lax-pair
edge distribution.

Unit convention resolved here (and used consistently below): the edge
distribution in its native soft-edge variables satisfies the spiked
boundary-value PDE only after the change of variables

    x_edge = 2^{2/3} x_bvp,    w_edge = 2^{1/3} w_robin.

Three independent probes agree on this: the PDE residual drops by two
orders of magnitude under the rescaling (4e-3 versus 0.5 on the shipped
grid), the beta = 4 stochastic Airy operator with Neumann boundary matches
the w = 0 edge law only after the x-rescaling (KS p = 0.8 versus 1e-165),
and the Robin w = +-1 operators match the rescaled w parameter
(p = 0.2-0.9 versus < 1e-9).  Reports carry both the resolved-convention
and literal-reading numbers.
"""

from __future__ import annotations

import math

import numpy as np

from .airy import ai_integral_above, airy_many, density_blind
from .densities import hard_edge_gap, hyp1f1_residue_beta2, hyp1f1_spiked, spiked_pdf
from .errors import InputDomainError
from .painleve import (
    PainleveTable,
    pde_residual,
    solve_hastings_mcleod,
    spiked_edge_cdf,
    spiked_edge_cdf_callable,
    spiked_edge_grid,
    tw_goe_cdf,
    tw_goe_cdf_callable,
)
from .sampling import (
    RobinSAOConfig,
    SpikeConfig,
    default_sao_config,
    goe_edge_scaled_samples,
    sample_multi_spike_spectra,
    sao_smallest_eigenvalues,
)
from .sampling import _secular_pair_batch, sample_secular_spectra
from .stats import equivalence_suite, ks_one_sample

# resolved unit maps between the edge-law variables and the
# boundary-value / stochastic-Airy variables
SAO_X_SCALE = 2.0 ** (2.0 / 3.0)
SAO_W_SCALE = 2.0 ** (1.0 / 3.0)

EQUIVALENCE_CONFIGS = ((1.0, 8.0, 5, 2.5), (2.0, 6.0, 4, 1.5), (4.0, 6.5, 5, 2.0))
FIRST_AIRY_ZERO = 2.3381074104597670


def _edge_scale(N: int) -> tuple[float, float]:
    return 16.0 * N, 4.0 * (4.0 * N) ** (1.0 / 3.0)


def beta4_edge_samples(N: int, w: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Soft-edge scaled largest eigenvalues of the spiked beta = 4 ensemble."""
    b = 2.0 - SAO_W_SCALE * w / N ** (1.0 / 3.0)
    if b <= 0:
        raise InputDomainError("w too large for this N: spike would be nonpositive")
    cfg = SpikeConfig(beta=4.0, n=N - 0.5, N=N, spikes=(b,))
    lam = sample_secular_spectra(cfg, rng, size, top_k=1)[:, 0]
    center, scale = _edge_scale(N)
    return np.sort((lam - center) / scale)


def suite_equivalence(beta: float, n: float, N: int, b: float, n_samples: int, seed: int, level: float = 0.001) -> dict:
    cfg = SpikeConfig(beta=beta, n=n, N=N, spikes=(b,))
    return equivalence_suite(cfg, n_samples, seed, level=level)


def suite_equivalence_all(n_samples: int = 10_000, seed: int = 20_240_501) -> dict:
    reports = [suite_equivalence(*params, n_samples=n_samples, seed=seed) for params in EQUIVALENCE_CONFIGS]
    return {
        "suite": "equivalence-all",
        "reports": reports,
        "passed": bool(all(r["passed"] for r in reports)),
    }


def suite_hardedge(
    seed: int = 7,
    betas: tuple[float, ...] = (1.0, 2.0),
    spikes: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0),
    s_values: tuple[float, ...] = (0.1, 0.3, 1.0),
    n_samples: int = 100_000,
    n_sigma: float = 3.0,
) -> dict:
    """Survival frequency of the smallest eigenvalue against the gap law.

    Uses the power-free parameter point n = N - 1 + 2/beta where the gap
    probability is exactly exp(-s sum 1/(2 b_j)).
    """
    N = len(spikes)
    checks = []
    for beta in betas:
        cfg = SpikeConfig(beta=beta, n=N - 1 + 2.0 / beta, N=N, spikes=spikes)
        rng = np.random.default_rng([seed, int(round(beta * 1000))])
        spec = sample_multi_spike_spectra(cfg, rng, n_samples)
        lam_min = spec[:, -1]
        for s_val in s_values:
            target = hard_edge_gap(s_val, spikes)
            emp = float(np.mean(lam_min > s_val))
            se = math.sqrt(target * (1.0 - target) / n_samples)
            checks.append(
                {
                    "beta": beta,
                    "s": s_val,
                    "empirical": emp,
                    "target": target,
                    "standard_error": se,
                    "pass": bool(abs(emp - target) <= n_sigma * se),
                }
            )
    return {
        "suite": "hardedge",
        "seed": seed,
        "n_samples": n_samples,
        "spikes": list(spikes),
        "checks": checks,
        "passed": bool(all(c["pass"] for c in checks)),
    }


def suite_consistency_chain(
    seed: int = 11,
    cases: tuple[tuple[float, int], ...] = ((2.0, 3), (4.0, 3), (1.0, 4)),
    n_configs: int = 100,
    b: float = 2.2,
    cov_tol: float = 1e-6,
) -> dict:
    """Ratio of the direct spiked density to prefactors times the
    hypergeometric factor must be constant across configurations."""
    rng = np.random.default_rng(seed)
    results = []
    for beta, N in cases:
        cfg = SpikeConfig(beta=beta, n=N + 2.0, N=N, spikes=(b,))
        mu = (b - 1.0) / (2.0 * b)
        a = beta * (cfg.n - N + 1) / 2.0 - 1.0
        ratios = np.empty(n_configs)
        for i in range(n_configs):
            lam = np.sort(rng.uniform(0.3, 9.0, N))[::-1]
            while np.min(-np.diff(lam)) < 1e-3:
                lam = np.sort(rng.uniform(0.3, 9.0, N))[::-1]
            pref = float(
                np.prod(lam**a)
                * math.exp(-lam.sum() / 2.0)
                * np.prod((lam[:, None] - lam[None, :])[np.triu_indices(N, 1)] ** beta)
            )
            ratios[i] = spiked_pdf(cfg, lam) / (pref * hyp1f1_spiked(beta, N, mu, lam))
        cov = float(ratios.std() / ratios.mean())
        results.append({"beta": beta, "N": N, "cov": cov, "pass": bool(cov < cov_tol)})
    return {
        "suite": "consistency-chain",
        "seed": seed,
        "n_configs": n_configs,
        "results": results,
        "passed": bool(all(r["pass"] for r in results)),
    }


def suite_residue_beta2(
    seed: int = 13,
    sizes: tuple[int, ...] = (2, 3, 5),
    n_cases: int = 100,
    rel_tol: float = 1e-8,
) -> dict:
    rng = np.random.default_rng(seed)
    results = []
    for N in sizes:
        worst = 0.0
        for _ in range(n_cases):
            x = np.sort(rng.uniform(0.3, 9.0, N))[::-1]
            while N > 1 and np.min(-np.diff(x)) < 5e-2:
                x = np.sort(rng.uniform(0.3, 9.0, N))[::-1]
            c = float(rng.uniform(-1.5, 1.5))
            if abs(c) < 1e-3:
                c = 0.5
            h_contour = hyp1f1_spiked(2.0, N, c, x)
            h_residue = hyp1f1_residue_beta2(c, x)
            worst = max(worst, abs(h_contour / h_residue - 1.0))
        results.append({"N": N, "worst_rel": worst, "pass": bool(worst < rel_tol)})
    return {
        "suite": "residue-beta2",
        "seed": seed,
        "n_cases": n_cases,
        "results": results,
        "passed": bool(all(r["pass"] for r in results)),
    }


def suite_softedge_w0(
    seed: int = 17,
    table: PainleveTable | None = None,
    n_goe: int = 10_000,
    n_goe_dim: int = 400,
    n_b4: int = 10_000,
    n_b4_dim: int = 200,
    level: float = 0.001,
) -> dict:
    """GOE tridiagonal edge and beta = 4 spiked edge at the critical spike
    both against the Tracy-Widom GOE distribution."""
    table = table or solve_hastings_mcleod()
    cdf = tw_goe_cdf_callable(table)
    s_goe = np.sort(goe_edge_scaled_samples(n_goe_dim, np.random.default_rng([seed, 1]), n_goe))
    r_goe = ks_one_sample(s_goe, cdf)
    s_b4 = beta4_edge_samples(n_b4_dim, 0.0, n_b4, np.random.default_rng([seed, 2]))
    r_b4 = ks_one_sample(s_b4, cdf)
    checks = [
        {"name": f"goe-tridiagonal-N{n_goe_dim}", "D": r_goe.statistic, "p": r_goe.p_value, "pass": bool(r_goe.p_value >= level)},
        {"name": f"beta4-spiked-b2-N{n_b4_dim}", "D": r_b4.statistic, "p": r_b4.p_value, "pass": bool(r_b4.p_value >= level)},
    ]
    return {
        "suite": "softedge-w0",
        "seed": seed,
        "level": level,
        "checks": checks,
        "passed": bool(all(c["pass"] for c in checks)),
    }


def suite_softedge_w(
    seed: int = 19,
    table: PainleveTable | None = None,
    w_values: tuple[float, ...] = (-1.0, 1.0),
    N: int = 200,
    n_samples: int = 10_000,
    level: float = 0.001,
) -> dict:
    """Spiked edge law at parameter w against the Lax-pair distribution.

    The w < 0 (supercritical) side converges only at rate N^{-1/3}; at
    N = 200 the residual location bias is detectable by a 10^4-sample KS
    test, which this suite reports honestly.
    """
    table = table or solve_hastings_mcleod()
    checks = []
    for i, w in enumerate(w_values):
        s = beta4_edge_samples(N, w, n_samples, np.random.default_rng([seed, 3 + i]))
        r = ks_one_sample(s, spiked_edge_cdf_callable(table, w))
        checks.append({"name": f"w={w:+g}", "D": r.statistic, "p": r.p_value, "pass": bool(r.p_value >= level)})
    return {
        "suite": "softedge-w",
        "seed": seed,
        "N": N,
        "n_samples": n_samples,
        "level": level,
        "checks": checks,
        "passed": bool(all(c["pass"] for c in checks)),
    }


def suite_identity_w0(table: PainleveTable | None = None, tol: float = 1e-10) -> dict:
    table = table or solve_hastings_mcleod()
    lhs = np.atleast_1d(spiked_edge_cdf(table, table.s, 0.0))
    rhs = np.atleast_1d(tw_goe_cdf(table, table.s))
    worst = float(np.abs(lhs - rhs).max())
    return {"suite": "identity-w0", "max_abs_diff": worst, "tol": tol, "passed": bool(worst < tol)}


def suite_pde_residual(
    table: PainleveTable | None = None,
    x_lo: float = -4.0,
    x_hi: float = 2.0,
    w_lo: float = -2.0,
    w_hi: float = 2.0,
    step: float = 0.02,
    tol: float = 5e-3,
    beta: float = 4.0,
) -> dict:
    """Residual of the spiked-edge boundary-value PDE over both w signs.

    The field is evaluated in the resolved coordinates (see module
    docstring): G(x, w) = F_edge(2^{2/3} x, +- 2^{1/3} w).  The literal
    reading, with no rescaling, is reported alongside; it does not satisfy
    the PDE (residual about 0.5) because the edge law's native variables
    carry the soft-edge normalization rather than the operator's.
    """
    table = table or solve_hastings_mcleod()

    def field_max_residual(h: float, x_scale: float, w_scale: float) -> float:
        xg = np.arange(x_lo, x_hi + 1e-12, h)
        wg = np.arange(w_lo, w_hi + 1e-12, h)
        field = spiked_edge_grid(table, x_scale * xg, w_scale * wg)
        res = pde_residual(field, xg, wg, beta)
        return float(np.abs(res).max())

    conventions = {}
    for label, w_sign in (("+w", 1.0), ("-w", -1.0)):
        conventions[label] = field_max_residual(step, SAO_X_SCALE, w_sign * SAO_W_SCALE)
    literal = {}
    for label, w_sign in (("+w", 1.0), ("-w", -1.0)):
        literal[label] = field_max_residual(step, 1.0, w_sign)
    best_label = min(conventions, key=conventions.get)
    best = conventions[best_label]
    halved = field_max_residual(step / 2.0, SAO_X_SCALE, (1.0 if best_label == "+w" else -1.0) * SAO_W_SCALE)
    return {
        "suite": "pde-residual",
        "grid_step": step,
        "resolved_convention": {
            "x_edge_per_x_bvp": SAO_X_SCALE,
            "w_edge_per_w_bvp": SAO_W_SCALE,
            "residuals": conventions,
        },
        "literal_reading_residuals": literal,
        "best_sign": best_label,
        "max_residual": best,
        "max_residual_halved_step": halved,
        "tol": tol,
        "passed": bool(best < tol and halved < best),
    }


def _blind_bin_counts(N: int, n_samples: int, w: float, rng: np.random.Generator, edges: np.ndarray, top_k: int = 24) -> np.ndarray:
    """Histogram counts of pooled (both species) scaled points per draw."""
    b = 2.0 - SAO_W_SCALE * w / N ** (1.0 / 3.0)
    cfg = SpikeConfig(beta=4.0, n=N - 0.5, N=N, spikes=(b,))
    x_top, y = _secular_pair_batch(cfg, rng, n_samples, top_k=top_k)
    center, scale = _edge_scale(N)
    pooled = np.concatenate([x_top, y[:, :top_k]], axis=1)
    s_vals = (pooled - center) / scale
    deepest = s_vals.min(axis=1).max()
    if deepest > edges[0]:
        raise InputDomainError(
            f"top-{top_k} points do not cover the histogram window (deepest {deepest:.2f})"
        )
    counts, _ = np.histogram(s_vals.ravel(), bins=edges)
    return counts


def suite_density_blind(
    seed: int = 23,
    n_samples: int = 10_000,
    N: int = 200,
    w_mc: float = -2.0,
    x_lo: float = -4.0,
    x_hi: float = 0.0,
    bin_width: float = 0.25,
    rel_tol: float = 0.05,
    n_sigma: float = 3.0,
    analytic_tol: float = 1e-4,
) -> dict:
    """Parity-blind density: analytic w = 0 curve against the GOE closed
    form, and the w = -2 curve against a Monte Carlo histogram."""
    xs = np.linspace(-6.0, 2.0, 81)
    worst_w0 = 0.0
    for x in xs:
        ai, aip = airy_many(x)
        goe = (aip * aip - x * ai * ai) + 0.5 * ai * (1.0 - float(ai_integral_above(x)))
        worst_w0 = max(worst_w0, abs(density_blind(float(x), 0.0) - goe))
    edges = np.arange(x_lo, x_hi + 1e-12, bin_width)
    rng = np.random.default_rng([seed, 5])
    counts = _blind_bin_counts(N, n_samples, w_mc, rng, edges)
    # the density's w and the spike map's w share the soft-edge units, so no
    # rescaling enters here (unlike the boundary-value correspondence)
    bins = []
    nodes, weights = np.polynomial.legendre.leggauss(4)
    for i in range(edges.size - 1):
        mid = 0.5 * (edges[i] + edges[i + 1])
        half = 0.5 * (edges[i + 1] - edges[i])
        dens = sum(
            wq * density_blind(float(mid + half * xq), w_mc) for xq, wq in zip(nodes, weights)
        ) * half
        expected = n_samples * dens
        sigma = math.sqrt(max(expected, 1.0))
        err = abs(counts[i] - expected)
        bins.append(
            {
                "s_lo": float(edges[i]),
                "s_hi": float(edges[i + 1]),
                "count": int(counts[i]),
                "expected": expected,
                "pass": bool(err <= rel_tol * expected + n_sigma * sigma),
            }
        )
    return {
        "suite": "density-blind",
        "seed": seed,
        "N": N,
        "n_samples": n_samples,
        "w_mc": w_mc,
        "analytic_w0_max_abs_err": worst_w0,
        "analytic_tol": analytic_tol,
        "bins": bins,
        "passed": bool(worst_w0 < analytic_tol and all(b["pass"] for b in bins)),
    }


def suite_sao(
    seed: int = 29,
    table: PainleveTable | None = None,
    n_draws: int = 5000,
    level: float = 0.001,
    airy_tol: float = 5e-3,
) -> dict:
    """Stochastic Airy operator: deterministic ground state and the
    beta = 4 Robin w = 0 law against the w = 0 edge distribution.

    Eigenvalues are mapped to edge-law units by the resolved factor
    2^{2/3}; the literal unscaled KS statistic is reported alongside.
    """
    table = table or solve_hastings_mcleod()
    det_cfg = RobinSAOConfig(beta=math.inf, w=math.inf, L=20.0, h=0.005, k=1)
    ground = float(sao_smallest_eigenvalues(det_cfg, None, 1)[0, 0])
    det_err = abs(ground - FIRST_AIRY_ZERO)
    cfg = default_sao_config(beta=4.0, w=0.0)
    vals = sao_smallest_eigenvalues(cfg, np.random.default_rng([seed, 6]), n_draws)
    raw = np.sort(-vals[:, 0])
    cdf = spiked_edge_cdf_callable(table, 0.0)
    r_resolved = ks_one_sample(raw * SAO_X_SCALE, cdf)
    r_literal = ks_one_sample(raw, cdf)
    return {
        "suite": "sao",
        "seed": seed,
        "deterministic_ground_state": ground,
        "first_airy_zero": FIRST_AIRY_ZERO,
        "deterministic_err": det_err,
        "resolved_x_scale": SAO_X_SCALE,
        "ks_resolved": {"D": r_resolved.statistic, "p": r_resolved.p_value},
        "ks_literal_unscaled": {"D": r_literal.statistic, "p": r_literal.p_value},
        "level": level,
        "passed": bool(det_err < airy_tol and r_resolved.p_value >= level),
    }


def suite_eigvec_invariant(seed: int = 31, n_matrices: int = 1000, max_dim: int = 12, rel_tol: float = 1e-10) -> dict:
    """Top-left entry equals the q-weighted eigenvalue mean on sampled models."""
    from .linalg import SymTridiag, tridiag_eigenvalues, tridiag_first_components
    from .sampling import sample_bidiagonal, tridiag_from_bidiagonal

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_matrices):
        N = int(rng.integers(1, max_dim + 1))
        beta = float(rng.choice([1.0, 2.0, 4.0]))
        n_par = N + float(rng.uniform(0.0, 4.0))
        cfg = SpikeConfig(beta=beta, n=n_par, N=N, spikes=(float(rng.uniform(0.5, 3.0)),))
        model = sample_bidiagonal(cfg, rng)
        diag, off = tridiag_from_bidiagonal(model)
        T = SymTridiag(diag=diag, offdiag=off)
        spec = tridiag_eigenvalues(T)
        q = tridiag_first_components(T, spec)
        lhs = float(np.sum(q * q * spec.values))
        worst = max(worst, abs(lhs - diag[0]) / (1.0 + abs(diag[0])))
    return {
        "suite": "eigvec-invariant",
        "n_matrices": n_matrices,
        "worst_rel_err": worst,
        "tol": rel_tol,
        "passed": bool(worst < rel_tol),
    }
