"""Exact (unnormalized) densities for the spiked ensemble.

The common numerical core is the branch-point integral

    phi(y; beta) = (1 / 2 pi i) int_Br e^w prod_j (w - y_j)^(-beta/2) dw,

taken over a contour from -i inf to +i inf passing to the RIGHT of every
branch point y_j, with principal-branch powers.  Passing on the right is
forced by analytic continuation from the regime where all y_j < 0: as the
y_j cross into the right half plane the contour must slide with them.  (A
contour left of the branch points would vanish identically for beta = 2,
where the integrand is meromorphic and decays leftward.)  Two checks pin
the convention: phi(0) = 1 / Gamma(N beta / 2) by Hankel's loop formula,
and at beta = 2 closing the contour leftward gives the exact residue sum

    phi(y; 2) = sum_j e^{y_j} / prod_{k != j} (y_j - y_k).

Numerically the contour is deformed to the parabola w = sigma - gamma v^2
+ i v with sigma just right of max(y, 0); the integrand then decays like
exp(-gamma v^2) and the trapezoid rule converges geometrically.  A bent
vertical-line contour is kept as an independent cross-check.

On top of phi sit the normalized confluent hypergeometric evaluation
(equal to 1 at c = 0 and to e^{c x} at N = 1), the spiked eigenvalue
density with its Laguerre-type prefactors, the interlaced joint densities,
the Dixon-Anderson conditional density, and the exponential hard-edge gap
law exp(-s sum 1/(2 b_j)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError, NumericalError
from .linalg import SpectrumSample
from .sampling import SpikeConfig

_REL_TOL = 1e-9
_MAX_DOUBLINGS = 6


@dataclass(frozen=True)
class ContourQuadrature:
    """Contour truncation and resolution for the branch-point integral.

    t_max is the truncation of the contour parameter, n_nodes the initial
    trapezoid resolution (doubled until two estimates agree to rel_tol).
    branch names the branch rule; only principal-branch powers are used,
    and the contour keeps every factor off the cut by construction.
    """

    t_max: float = 7.0
    n_nodes: int = 256
    branch: str = "principal"
    contour: str = "parabola"
    rel_tol: float = _REL_TOL

    def __post_init__(self):
        if self.t_max <= 0:
            raise InputDomainError("t_max must be positive")
        if self.n_nodes < 64:
            raise InputDomainError("n_nodes must be at least 64")
        if self.contour not in ("parabola", "line"):
            raise InputDomainError("contour must be 'parabola' or 'line'")
        if self.branch != "principal":
            raise InputDomainError("only the principal branch rule is implemented")


def _phi_once(y: np.ndarray, beta: float, quad: ContourQuadrature, n_nodes: int) -> complex:
    sigma = max(0.0, float(y.max()) if y.size else 0.0) + 1.0
    if quad.contour == "parabola":
        v = np.linspace(-quad.t_max, quad.t_max, n_nodes)
        w = sigma - v * v + 1j * v
        dw = -2.0 * v + 1j
    else:
        # vertical segment of half-height t_max, then 135-degree rays that
        # carry e^w to zero while staying clear of the cuts on the real axis;
        # composite Gauss-Legendre panels keep the corners harmless
        dirn = np.exp(3j * np.pi / 4.0)
        n_panels = max(8, n_nodes // 16)
        s_nodes, s_weights = _gl_panels(-quad.t_max, quad.t_max, n_panels)
        r_nodes, r_weights = _gl_panels(0.0, 6.0 * quad.t_max, n_panels)
        w = np.concatenate(
            [
                sigma - 1j * quad.t_max + r_nodes[::-1] * np.conj(dirn),
                sigma + 1j * s_nodes,
                sigma + 1j * quad.t_max + r_nodes * dirn,
            ]
        )
        dw = np.concatenate(
            [
                -np.conj(dirn) * r_weights[::-1],
                1j * s_weights,
                dirn * r_weights,
            ]
        )
    z = w[:, None] - y[None, :] if y.size else np.zeros((w.size, 0), dtype=complex)
    if np.any((z.imag == 0.0) & (z.real <= 0.0)):
        raise NumericalError("contour touched a branch cut")
    integrand = np.exp(w - 0.5 * beta * np.log(z).sum(axis=1))
    vals = integrand * dw
    if quad.contour == "parabola":
        h = v[1] - v[0]
        total = h * (vals.sum() - 0.5 * (vals[0] + vals[-1]))
    else:
        total = vals.sum()
    return total / (2j * np.pi)


_GL16 = np.polynomial.legendre.leggauss(16)


def _gl_panels(a: float, b: float, n_panels: int) -> tuple[np.ndarray, np.ndarray]:
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL16[0][None, :]).ravel()
    weights = (half[:, None] * _GL16[1][None, :]).ravel()
    return nodes, weights


def branch_point_integral(y, beta: float, quad: ContourQuadrature | None = None) -> float:
    """phi(y; beta) with adaptive node doubling and a reality check."""
    if quad is None:
        quad = ContourQuadrature()
    yv = np.asarray(y, dtype=float).reshape(-1)
    if yv.size and not np.all(np.isfinite(yv)):
        raise InputDomainError("branch points must be finite")
    n_total = yv.size * beta / 2.0
    if n_total <= 0.25:
        # on the deformed contour e^w supplies the decay, so even the slowly
        # decaying algebraic envelope converges; only extreme exponents with
        # a near-nonintegrable vertex are refused
        raise InputDomainError("branch point integral requires N beta / 2 > 1/4")
    spread = (float(yv.max() - yv.min()) if yv.size else 0.0) + abs(float(yv.max()) if yv.size else 0.0)
    nodes = max(quad.n_nodes, 64)
    prev = _phi_once(yv, beta, quad, nodes)
    for _ in range(_MAX_DOUBLINGS):
        nodes *= 2
        cur = _phi_once(yv, beta, quad, nodes)
        err = abs(cur - prev) / max(abs(cur), 1e-300)
        prev = cur
        if err < quad.rel_tol:
            break
    else:
        raise NumericalError(
            f"contour quadrature failed to converge: relative change {err:.2e} "
            f"at {nodes} nodes (spread {spread:.3g})"
        )
    value = prev
    if abs(value.imag) > 1e-6 * max(abs(value.real), 1e-300):
        raise NumericalError(f"contour integral lost conjugate symmetry: {value!r}")
    return float(value.real)


def hyp1f1_spiked(beta: float, N: int, c: float, x, quad: ContourQuadrature | None = None) -> float:
    """Confluent hypergeometric value with arguments scaled by c, normalized to 1 at c = 0.

    Equals e^{c x_1} at N = 1 and matches the residue oracle at beta = 2.
    """
    xv = _spectrum_values(x)
    if xv.size != N:
        raise InputDomainError("x must carry N points")
    if np.any(xv <= 0):
        raise InputDomainError("x must be positive")
    _require_distinct(xv)
    if c == 0.0:
        return 1.0
    if N == 1:
        # single-variable confluent case collapses to a pure exponential
        return math.exp(c * xv[0])
    phi = branch_point_integral(c * xv, beta, quad)
    phi0 = 1.0 / math.gamma(N * beta / 2.0)
    return phi / phi0


def hyp1f1_residue_beta2(c: float, x) -> float:
    """Residue-sum evaluation at beta = 2, same normalization as hyp1f1_spiked.

    The closed contour around the (simple) poles gives
    sum_j e^{c x_j} / prod_{k != j} (c x_j - c x_k); dividing by the c = 0
    value of the contour integral multiplies by Gamma(N) c^{N-1}.
    """
    xv = _spectrum_values(x)
    n = xv.size
    scale = max(1.0, float(np.abs(xv).max()))
    gaps = xv[:, None] - xv[None, :]
    off = gaps[~np.eye(n, dtype=bool)]
    if n > 1 and np.abs(off).min() < 1e-10 * scale:
        raise NumericalError("near-coincident points: residue sum is ill-conditioned")
    if c == 0.0:
        return 1.0
    if n == 1:
        return math.exp(c * xv[0])
    total = 0.0
    for j in range(n):
        denom = np.prod(np.delete(xv[j] - xv, j))
        total += math.exp(c * xv[j]) / denom
    return math.gamma(n) * c ** (1 - n) * total


def _spectrum_values(x) -> np.ndarray:
    if isinstance(x, SpectrumSample):
        return x.values
    return np.asarray(x, dtype=float).reshape(-1)


def _require_distinct(xv: np.ndarray) -> None:
    if xv.size > 1:
        scale = max(1.0, float(np.abs(xv).max()))
        srt = np.sort(xv)
        if np.min(np.diff(srt)) < 1e-12 * scale:
            raise InputDomainError("points must be distinct")


# ----------------------------------------------------------------------
# Spiked eigenvalue density
# ----------------------------------------------------------------------

def _prefactor_log(beta: float, n: float, N: int, lam: np.ndarray) -> float:
    a = beta * (n - N + 1) / 2.0 - 1.0
    lam_desc = np.sort(lam)[::-1]
    gaps = lam_desc[:, None] - lam_desc[None, :]
    upper = gaps[np.triu_indices(N, 1)]
    return float(a * np.log(lam).sum() - 0.5 * lam.sum() + beta * np.log(upper).sum())


def log_spiked_pdf(cfg: SpikeConfig, lam, quad: ContourQuadrature | None = None) -> float:
    """Log of the unnormalized spiked density at the configuration lam."""
    lam_v = _spectrum_values(lam)
    _validate_lambda(cfg, lam_v)
    beta, n, N, b = cfg.beta, cfg.n, cfg.N, cfg.b
    log_pref = _prefactor_log(beta, n, N, lam_v)
    if b == 1.0:
        return log_pref
    mu = (b - 1.0) / (2.0 * b)
    if N == 1:
        return log_pref + mu * lam_v[0]
    phi = branch_point_integral(mu * lam_v, beta, quad)
    if phi <= 0:
        raise NumericalError("contour factor was not positive")
    return log_pref + math.log(2.0 * math.pi * phi)


def spiked_pdf(cfg: SpikeConfig, lam, quad: ContourQuadrature | None = None) -> float:
    """Unnormalized spiked eigenvalue density (product-domain evaluation).

    The b = 1 case drops the contour factor entirely: the integral is then
    independent of lam and is absorbed by the unspecified normalization.
    """
    lam_v = _spectrum_values(lam)
    _validate_lambda(cfg, lam_v)
    beta, n, N, b = cfg.beta, cfg.n, cfg.N, cfg.b
    a = beta * (n - N + 1) / 2.0 - 1.0
    lam_desc = np.sort(lam_v)[::-1]
    pref = float(np.prod(lam_v**a) * np.prod(np.exp(-lam_v / 2.0)))
    gaps = lam_desc[:, None] - lam_desc[None, :]
    pref *= float(np.prod(gaps[np.triu_indices(N, 1)] ** beta))
    if b == 1.0:
        return pref
    mu = (b - 1.0) / (2.0 * b)
    if N == 1:
        return pref * math.exp(mu * lam_v[0])
    phi = branch_point_integral(mu * lam_v, beta, quad)
    value = pref * 2.0 * math.pi * phi
    if value < -1e-8 * abs(pref):
        raise NumericalError("spiked density came out negative beyond quadrature error")
    return value


def _validate_lambda(cfg: SpikeConfig, lam_v: np.ndarray) -> None:
    if lam_v.size != cfg.N:
        raise InputDomainError("lambda must carry N points")
    if np.any(lam_v <= 0):
        raise InputDomainError("lambda must be positive")
    _require_distinct(lam_v)


# ----------------------------------------------------------------------
# Interlaced joint and conditional densities
# ----------------------------------------------------------------------

def _interlaced(x: np.ndarray, y: np.ndarray, close_with_zero: bool) -> bool:
    seq = []
    for i in range(y.size):
        seq.extend([x[i], y[i]])
    seq.extend(x[y.size :])
    if close_with_zero:
        seq.append(0.0)
    arr = np.asarray(seq)
    return bool(np.all(np.diff(arr) < 0))


def joint_pdf(cfg: SpikeConfig, x, y, log: bool = False) -> float:
    """Unnormalized joint density of the interlaced pair (x, y).

    The mode follows the length of y: N-1 points select the zero-block
    regime (n >= N), N points the exponential-weight regime driven by
    n = N - 1 + 2/beta.  Non-interlaced input has density zero.
    """
    xv = np.sort(_spectrum_values(x))[::-1]
    yv = np.sort(_spectrum_values(y))[::-1]
    beta, n, N, b = cfg.beta, cfg.n, cfg.N, cfg.b
    if xv.size != N or yv.size not in (N, N - 1):
        raise InputDomainError("x must have N points and y either N or N-1")
    if not _interlaced(xv, yv, close_with_zero=True):
        return -math.inf if log else 0.0
    cross = np.abs(xv[:, None] - yv[None, :])
    log_cross = (beta / 2.0 - 1.0) * np.log(cross).sum()
    up_x = (xv[:, None] - xv[None, :])[np.triu_indices(N, 1)]
    if yv.size == N - 1:
        a = beta * (n - N + 1) / 2.0 - 1.0
        up_y = (yv[:, None] - yv[None, :])[np.triu_indices(N - 1, 1)] if N > 2 else np.array([1.0])
        log_val = (
            a * np.log(xv).sum()
            - xv.sum() / (2.0 * b)
            - (1.0 - 1.0 / b) * yv.sum() / 2.0
            + np.log(up_y).sum()
            + np.log(up_x).sum()
            + log_cross
        )
    else:
        up_y = (yv[:, None] - yv[None, :])[np.triu_indices(N, 1)]
        log_val = (
            -0.5 * (yv.sum() + (xv.sum() - yv.sum()) / b)
            + np.log(up_x).sum()
            + np.log(up_y).sum()
            + log_cross
        )
    return float(log_val) if log else float(math.exp(log_val))


def da_conditional_pdf(beta: float, x, y, log: bool = False) -> float:
    """Dixon-Anderson conditional density of y given x (normalized).

    y has N-1 points interlacing the N points of x, with an implicit
    trailing zero: x_1 > y_1 > ... > y_{N-1} > x_N > 0.
    """
    xv = np.sort(_spectrum_values(x))[::-1]
    yv = np.sort(_spectrum_values(y))[::-1]
    n = xv.size
    if yv.size != n - 1:
        raise InputDomainError("y must have N-1 points")
    if not (_interlaced(xv, yv, close_with_zero=False) and xv[-1] > 0 and (yv.size == 0 or yv[-1] > xv[-1])):
        return -math.inf if log else 0.0
    log_const = math.lgamma(n * beta / 2.0) - n * math.lgamma(beta / 2.0)
    up_y = (yv[:, None] - yv[None, :])[np.triu_indices(n - 1, 1)] if n > 2 else np.array([1.0])
    up_x = (xv[:, None] - xv[None, :])[np.triu_indices(n, 1)]
    cross = np.abs(yv[:, None] - xv[None, :])
    log_val = (
        log_const
        + np.log(up_y).sum()
        - (beta - 1.0) * np.log(up_x).sum()
        + (beta / 2.0 - 1.0) * np.log(cross).sum()
    )
    return float(log_val) if log else float(math.exp(log_val))


def hard_edge_gap(s: float, spikes) -> float:
    """P(no eigenvalue in (0, s)) in the power-free parameter case."""
    if s < 0:
        raise InputDomainError("s must be >= 0")
    b = np.asarray(spikes, dtype=float).reshape(-1)
    if np.any(b <= 0):
        raise InputDomainError("spikes must be positive")
    return float(math.exp(-s * float(np.sum(1.0 / (2.0 * b)))))
