"""Kolmogorov-Smirnov machinery and the cross-construction equivalence suite.

The two-sample statistic is the exact sup-distance between empirical CDFs;
p-values use the asymptotic Kolmogorov series with the standard small-sample
effective-size correction.  The equivalence suite draws matched batches from
the bidiagonal, secular, and pencil constructions and compares chosen order
statistics pairwise, Bonferroni-corrected at the suite level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError
from .sampling import (
    SpikeConfig,
    sample_pencil_spectra,
    sample_secular_spectra,
    sample_spiked_spectra,
)


@dataclass(frozen=True)
class KSResult:
    statistic: float
    n: int
    m: int | None
    p_value: float


def kolmogorov_sf(lam: float) -> float:
    """Survival function of the Kolmogorov distribution, Q(lam)."""
    if lam <= 0.0:
        return 1.0
    if lam < 0.2:
        return 1.0
    total = 0.0
    sign = 1.0
    for k in range(1, 200):
        term = sign * math.exp(-2.0 * k * k * lam * lam)
        total += term
        sign = -sign
        if abs(term) < 1e-16 * max(abs(total), 1e-300):
            break
    return float(min(max(2.0 * total, 0.0), 1.0))


def _check_sorted(a: np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float).reshape(-1)
    if arr.size and np.any(np.diff(arr) < 0):
        raise InputDomainError(f"{name} must be sorted ascending")
    return arr


def ks_two_sample(a, b) -> KSResult:
    """Exact two-sample KS statistic with asymptotic p-value."""
    a = _check_sorted(a, "a")
    b = _check_sorted(b, "b")
    n, m = a.size, b.size
    if n < 10 or m < 10:
        raise InputDomainError("samples must have at least 10 points")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / n
    cdf_b = np.searchsorted(b, pooled, side="right") / m
    d = float(np.abs(cdf_a - cdf_b).max())
    ne = math.sqrt(n * m / (n + m))
    p = kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)
    return KSResult(statistic=d, n=n, m=m, p_value=p)


def ks_one_sample(a, cdf) -> KSResult:
    """One-sample KS against a callable CDF (must be nondecreasing)."""
    a = _check_sorted(a, "a")
    n = a.size
    if n < 10:
        raise InputDomainError("sample must have at least 10 points")
    f = np.asarray(cdf(a), dtype=float)
    if np.any(np.diff(f) < -1e-12):
        raise InputDomainError("cdf evaluations are not monotone")
    if np.any(f < -1e-9) or np.any(f > 1 + 1e-9):
        raise InputDomainError("cdf values must lie in [0, 1]")
    grid = np.arange(1, n + 1) / n
    d_plus = float(np.max(grid - f))
    d_minus = float(np.max(f - (grid - 1.0 / n)))
    d = max(d_plus, d_minus)
    ne = math.sqrt(n)
    p = kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)
    return KSResult(statistic=d, n=n, m=None, p_value=p)


# ----------------------------------------------------------------------
# Cross-construction equivalence
# ----------------------------------------------------------------------

_CONSTRUCTION_STREAMS = {"bidiagonal": 1, "secular": 2, "pencil": 3}


def construction_rng(seed: int, construction: str, block: int = 0) -> np.random.Generator:
    """Deterministic stream keyed by seed, construction, and block index."""
    return np.random.default_rng([int(seed), _CONSTRUCTION_STREAMS.get(construction, 99), int(block)])


def _marginal_labels(N: int) -> list[tuple[str, int]]:
    top = [(f"largest-{i + 1}", i) for i in range(min(3, N))]
    bottom = [(f"smallest-{i + 1}", N - 1 - i) for i in range(min(3, N))]
    seen: dict[int, tuple[str, int]] = {}
    for label, idx in top + bottom:
        seen.setdefault(idx, (label, idx))
    return [seen[k] for k in sorted(seen)]


def equivalence_suite(cfg: SpikeConfig, n_samples: int, seed: int, level: float = 0.001) -> dict:
    """Pairwise KS comparison of the three constructions at one parameter point.

    Order-statistic marginals (top three and bottom three) plus the pooled
    spectrum are tested for each pair; the pass threshold applies the
    Bonferroni correction across every comparison in the suite.
    """
    if n_samples < 100:
        raise InputDomainError("equivalence suite needs at least 100 samples")
    draws = {
        "bidiagonal": sample_spiked_spectra(cfg, construction_rng(seed, "bidiagonal"), n_samples),
        "secular": sample_secular_spectra(cfg, construction_rng(seed, "secular"), n_samples),
        "pencil": sample_pencil_spectra(cfg, construction_rng(seed, "pencil"), n_samples),
    }
    pairs = [("bidiagonal", "secular"), ("bidiagonal", "pencil"), ("secular", "pencil")]
    marginals = _marginal_labels(cfg.N)
    comparisons = []
    for left, right in pairs:
        for label, idx in marginals:
            res = ks_two_sample(np.sort(draws[left][:, idx]), np.sort(draws[right][:, idx]))
            comparisons.append(
                {
                    "pair": f"{left}|{right}",
                    "statistic_name": label,
                    "D": res.statistic,
                    "p": res.p_value,
                }
            )
        res = ks_two_sample(np.sort(draws[left].ravel()), np.sort(draws[right].ravel()))
        comparisons.append(
            {"pair": f"{left}|{right}", "statistic_name": "pooled", "D": res.statistic, "p": res.p_value}
        )
    alpha = level / len(comparisons)
    for comp in comparisons:
        comp["pass"] = bool(comp["p"] >= alpha)
    report = {
        "suite": "equivalence",
        "config": {"beta": cfg.beta, "n": cfg.n, "N": cfg.N, "b": cfg.spikes[0]},
        "n_samples": n_samples,
        "seed": seed,
        "level": level,
        "bonferroni_alpha": alpha,
        "comparisons": comparisons,
        "passed": bool(all(c["pass"] for c in comparisons)),
    }
    return report
