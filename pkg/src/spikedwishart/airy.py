"""Airy function machinery and the soft-edge one-point densities.

Evaluation scheme for Ai and Ai':

* |x| <= 2: Maclaurin series (entire, no cancellation trouble here).
* 2 < x < 8 and -8 < x < -2: Taylor steps of the ODE y'' = x y from a
  precomputed anchor table.  The positive table is marched downward from
  x = 8 where the exponential asymptotic expansion is already at machine
  precision, which is the numerically stable direction for the decaying
  solution.  The negative table is marched from the series region.
* |x| >= 8: asymptotic expansions with optimal truncation; the positive
  side is exponential, the negative side oscillatory.  Agreement with the
  marching scheme across the switchover is part of the test suite.

On top of that sit the Airy kernel K(X, Y) = int_0^inf Ai(u+X) Ai(u+Y) du,
its tail integral int_X^inf Ai, and the two parameter-dependent soft-edge
densities used by the interlaced beta = 4 model: the y-species density

    rho_y(X) = K(X, X)/2 - Ai(X)/4 * int_X^inf Ai(t) dt

and the parity-blind density rho_b(X; w).  The blind density is evaluated
in an integrated-by-parts form whose w = 0 limit is exactly

    K(X, X) + Ai(X)/2 * int_{-inf}^X Ai(t) dt,

the GOE soft-edge density; for w < 0 all remaining integrals carry the
exponential damping factor exp(w (X - t) / 2) and truncate cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError

_SQRT_PI = np.sqrt(np.pi)
_SWITCH = 8.0
_SERIES_EDGE = 2.0
_DOMAIN = 40.0

# ----------------------------------------------------------------------
# Asymptotic coefficients u_k, v_k
# ----------------------------------------------------------------------

_N_ASY = 32
_U = np.ones(_N_ASY)
_V = np.ones(_N_ASY)
for _k in range(1, _N_ASY):
    _U[_k] = _U[_k - 1] * (6 * _k - 5) * (6 * _k - 3) * (6 * _k - 1) / (216.0 * _k * (2 * _k - 1))
    _V[_k] = _U[_k] * (6 * _k + 1) / (1.0 - 6 * _k)


def _asymptotic_sum(coef: np.ndarray, inv_zeta: np.ndarray, alternate: bool) -> np.ndarray:
    """Sum coef_k * (+-1)^k * inv_zeta^k with optimal truncation, batched."""
    term = np.ones_like(inv_zeta)
    total = np.ones_like(inv_zeta)
    active = np.ones_like(inv_zeta, dtype=bool)
    prev_mag = np.full_like(inv_zeta, np.inf)
    sign = -1.0 if alternate else 1.0
    for k in range(1, coef.size):
        term = term * inv_zeta * (coef[k] / coef[k - 1]) * sign
        mag = np.abs(term)
        active &= mag < prev_mag
        total = np.where(active, total + term, total)
        prev_mag = mag
        if not active.any():
            break
    return total


def _airy_asym_pos(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    zeta = (2.0 / 3.0) * x ** 1.5
    inv = 1.0 / zeta
    su = _asymptotic_sum(_U, inv, alternate=True)
    sv = _asymptotic_sum(_V, inv, alternate=True)
    pref = np.exp(-zeta) / (2.0 * _SQRT_PI)
    ai = pref * su / x ** 0.25
    aip = -pref * sv * x ** 0.25
    return ai, aip


def _airy_asym_neg(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z = -x
    zeta = (2.0 / 3.0) * z ** 1.5
    om = zeta - 0.25 * np.pi
    inv2 = zeta ** -2.0
    even_u = _asymptotic_sum(_U[0::2], inv2, alternate=True)
    odd_u = (_U[1] / zeta) * _asymptotic_sum(_U[1::2], inv2, alternate=True)
    even_v = _asymptotic_sum(_V[0::2], inv2, alternate=True)
    odd_v = (_V[1] / zeta) * _asymptotic_sum(_V[1::2], inv2, alternate=True)
    ai = (np.cos(om) * even_u + np.sin(om) * odd_u) / (_SQRT_PI * z ** 0.25)
    aip = (z ** 0.25 / _SQRT_PI) * (np.sin(om) * even_v - np.cos(om) * odd_v)
    return ai, aip


# ----------------------------------------------------------------------
# Maclaurin series
# ----------------------------------------------------------------------

_AI0 = 0.3550280538878172392600631860041831763980
_AIP0 = -0.2588194037928067984051835601892039634793

_N_SER = 24
_CF = np.ones(_N_SER)
_CG = np.ones(_N_SER)
for _k in range(1, _N_SER):
    _CF[_k] = _CF[_k - 1] / ((3 * _k) * (3 * _k - 1))
    _CG[_k] = _CG[_k - 1] / ((3 * _k + 1) * (3 * _k))


def _airy_series(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x3 = x ** 3
    f = np.zeros_like(x)
    fp = np.zeros_like(x)
    g = np.zeros_like(x)
    gp = np.zeros_like(x)
    pw = np.ones_like(x)  # x^{3k}
    for k in range(_N_SER):
        f += _CF[k] * pw
        g += _CG[k] * pw * x
        if k > 0:
            fp += _CF[k] * 3 * k * pw / np.where(x == 0.0, 1.0, x)
        gp += _CG[k] * (3 * k + 1) * pw
        pw = pw * x3
    # fp at x == 0 is exactly 0; the guarded division already produced 0
    ai = _AI0 * f + _AIP0 * g
    aip = _AI0 * fp + _AIP0 * gp
    return ai, aip


# ----------------------------------------------------------------------
# Taylor-step anchor tables for the mid ranges
# ----------------------------------------------------------------------

def _taylor_step(x0: float, y: float, yp: float, delta: float, terms: int = 30) -> tuple[float, float]:
    t = np.zeros(terms)
    t[0] = y
    t[1] = yp
    for k in range(terms - 2):
        t[k + 2] = (x0 * t[k] + (t[k - 1] if k >= 1 else 0.0)) / ((k + 2) * (k + 1))
    val = 0.0
    der = 0.0
    for k in range(terms - 1, -1, -1):
        val = val * delta + t[k]
        if k >= 1:
            der = der * delta + k * t[k]
    return val, der


class _AnchorTable:
    def __init__(self, start: float, stop: float, step: float, seed_ai: float, seed_aip: float):
        count = int(round(abs(stop - start) / step)) + 1
        direction = np.sign(stop - start)
        self.xs = start + direction * step * np.arange(count)
        ai = np.empty(count)
        aip = np.empty(count)
        ai[0], aip[0] = seed_ai, seed_aip
        for i in range(1, count):
            ai[i], aip[i] = _taylor_step(self.xs[i - 1], ai[i - 1], aip[i - 1], self.xs[i] - self.xs[i - 1])
        self.ai = ai
        self.aip = aip
        self.step = direction * step

    def eval(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        idx = np.clip(np.round((x - self.xs[0]) / self.step).astype(int), 0, self.xs.size - 1)
        ai = np.empty_like(x)
        aip = np.empty_like(x)
        terms = 18
        for i in np.unique(idx):
            sel = idx == i
            t = np.zeros(terms)
            t[0] = self.ai[i]
            t[1] = self.aip[i]
            x0 = self.xs[i]
            for k in range(terms - 2):
                t[k + 2] = (x0 * t[k] + (t[k - 1] if k >= 1 else 0.0)) / ((k + 2) * (k + 1))
            d = x[sel] - x0
            val = np.zeros_like(d)
            der = np.zeros_like(d)
            for k in range(terms - 1, -1, -1):
                val = val * d + t[k]
                if k >= 1:
                    der = der * d + k * t[k]
            ai[sel] = val
            aip[sel] = der
        return ai, aip


_tables: dict[str, _AnchorTable] = {}


def _get_tables() -> dict[str, _AnchorTable]:
    if not _tables:
        ai8, aip8 = _airy_asym_pos(np.array([_SWITCH]))
        _tables["pos"] = _AnchorTable(_SWITCH, _SERIES_EDGE, 0.25, float(ai8[0]), float(aip8[0]))
        ai2, aip2 = _airy_series(np.array([-_SERIES_EDGE]))
        _tables["neg"] = _AnchorTable(-_SERIES_EDGE, -_SWITCH, 0.125, float(ai2[0]), float(aip2[0]))
    return _tables


# ----------------------------------------------------------------------
# Public evaluation
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AiryEval:
    x: float
    ai: float
    ai_prime: float


def airy_many(x) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (Ai, Ai') for |x| <= 40."""
    xv = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xv).astype(float).ravel()
    if flat.size and (not np.all(np.isfinite(flat)) or np.any(np.abs(flat) > _DOMAIN)):
        raise InputDomainError(f"airy arguments must be finite with |x| <= {_DOMAIN}")
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)
    ser = np.abs(flat) <= _SERIES_EDGE
    pos_mid = (flat > _SERIES_EDGE) & (flat < _SWITCH)
    neg_mid = (flat < -_SERIES_EDGE) & (flat > -_SWITCH)
    pos_far = flat >= _SWITCH
    neg_far = flat <= -_SWITCH
    if ser.any():
        ai[ser], aip[ser] = _airy_series(flat[ser])
    if pos_mid.any():
        ai[pos_mid], aip[pos_mid] = _get_tables()["pos"].eval(flat[pos_mid])
    if neg_mid.any():
        ai[neg_mid], aip[neg_mid] = _get_tables()["neg"].eval(flat[neg_mid])
    if pos_far.any():
        ai[pos_far], aip[pos_far] = _airy_asym_pos(flat[pos_far])
    if neg_far.any():
        ai[neg_far], aip[neg_far] = _airy_asym_neg(flat[neg_far])
    ai = ai.reshape(np.shape(xv)) if np.ndim(xv) else ai[0]
    aip = aip.reshape(np.shape(xv)) if np.ndim(xv) else aip[0]
    return ai, aip


def airy(x: float) -> AiryEval:
    """Ai(x) and Ai'(x) for a scalar argument."""
    ai, aip = airy_many(float(x))
    return AiryEval(x=float(x), ai=float(ai), ai_prime=float(aip))


# ----------------------------------------------------------------------
# Panel quadrature helpers
# ----------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _panel_nodes(a: float, b: float, n_panels: int) -> tuple[np.ndarray, np.ndarray]:
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


# ----------------------------------------------------------------------
# Tail integral of Ai and its interpolation table
# ----------------------------------------------------------------------

class _AiIntTable:
    """int_z^inf Ai on a uniform grid with exact-derivative Hermite interpolation."""

    lo = -16.0
    hi = 40.0
    step = 0.02

    def __init__(self):
        count = int(round((self.hi - self.lo) / self.step)) + 1
        self.z = np.linspace(self.lo, self.hi, count)
        nodes, weights = _panel_nodes(self.lo, self.hi, count - 1)
        vals = airy_many(nodes)[0] * weights
        per_panel = vals.reshape(count - 1, _GL_NODES.size).sum(axis=1)
        # leading asymptotic of the remaining tail above hi
        zeta = (2.0 / 3.0) * self.hi ** 1.5
        tail = np.exp(-zeta) / (2.0 * _SQRT_PI * self.hi ** 0.75)
        table = np.empty(count)
        table[-1] = tail
        table[:-1] = tail + np.cumsum(per_panel[::-1])[::-1]
        self.val = table
        self.der = -airy_many(self.z)[0]

    def eval(self, z) -> np.ndarray:
        zv = np.asarray(z, dtype=float)
        flat = np.atleast_1d(zv).ravel()
        out = np.empty_like(flat)
        below = flat < self.lo
        above = flat > self.hi
        mid = ~(below | above)
        if below.any():
            # int_z^inf = 1 - int_{-inf}^z; clamp to the full mass
            out[below] = 1.0 - _ai_mass_below_asym(flat[below])
        if above.any():
            out[above] = 0.0
        if mid.any():
            zz = flat[mid]
            idx = np.clip(((zz - self.lo) / self.step).astype(int), 0, self.z.size - 2)
            t = (zz - self.z[idx]) / self.step
            h = self.step
            y0 = self.val[idx]
            y1 = self.val[idx + 1]
            d0 = self.der[idx]
            d1 = self.der[idx + 1]
            h00 = (1 + 2 * t) * (1 - t) ** 2
            h10 = t * (1 - t) ** 2
            h01 = t * t * (3 - 2 * t)
            h11 = t * t * (t - 1)
            out[mid] = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
        return out.reshape(np.shape(zv)) if np.ndim(zv) else out[0]


def _ai_mass_below_asym(z: np.ndarray) -> np.ndarray:
    """Leading asymptotic of int_{-inf}^z Ai for very negative z."""
    t = -z
    zeta = (2.0 / 3.0) * t ** 1.5
    return -np.sin(zeta - 0.25 * np.pi) / (_SQRT_PI * t ** 0.75)


_aiint_table: list[_AiIntTable] = []


def ai_integral_above(z) -> np.ndarray:
    """int_z^inf Ai(t) dt, vectorized."""
    if not _aiint_table:
        _aiint_table.append(_AiIntTable())
    return _aiint_table[0].eval(z)


# ----------------------------------------------------------------------
# Airy kernel
# ----------------------------------------------------------------------

def airy_kernel(X: float, Y: float) -> float:
    """K(X, Y) = int_0^inf Ai(u+X) Ai(u+Y) du for X, Y >= -15."""
    if min(X, Y) < -15.0:
        raise InputDomainError("airy_kernel is supported for X, Y >= -15")
    u_max = min(max(14.0 - min(X, Y), 4.0), _DOMAIN - 0.5 - max(X, Y))
    n_panels = max(8, int(np.ceil(u_max / 0.5)))
    nodes, weights = _panel_nodes(0.0, u_max, n_panels)
    ai_x = airy_many(nodes + X)[0]
    ai_y = ai_x if Y == X else airy_many(nodes + Y)[0]
    return float(np.sum(weights * ai_x * ai_y))


def airy_kernel_dx(t: float, X: float) -> float:
    """Partial derivative of K in its second argument: int Ai(u+t) Ai'(u+X) du."""
    if min(t, X) < -30.0:
        raise InputDomainError("kernel derivative argument too negative")
    u_max = min(max(14.0 - min(t, X), 4.0), _DOMAIN - 0.5 - max(t, X))
    n_panels = max(8, int(np.ceil(u_max / 0.5)))
    nodes, weights = _panel_nodes(0.0, u_max, n_panels)
    ai_t = airy_many(nodes + t)[0]
    aip_x = airy_many(nodes + X)[1]
    return float(np.sum(weights * ai_t * aip_x))


def _kernel_row(ts: np.ndarray, X: float, derivative: bool = False) -> np.ndarray:
    """K(t, X) (or its first-argument derivative pairing) for many t at once.

    Truncation is governed by the decaying factor at argument u + X; the
    other factor stays bounded, so the neglected tail is below 1e-12.
    """
    u_max = min(max(14.0 - X, 4.0), _DOMAIN - 0.5 - max(float(ts.max()), X))
    n_panels = max(8, int(np.ceil(u_max / 0.5)))
    nodes, weights = _panel_nodes(0.0, u_max, n_panels)
    fx = airy_many(nodes + X)[1 if derivative else 0]
    at = airy_many(ts[:, None] + nodes[None, :])[0]
    return at @ (weights * fx)


# ----------------------------------------------------------------------
# Soft-edge densities
# ----------------------------------------------------------------------

def density_species_y(X: float) -> float:
    """Scaled density of the unperturbed (y) species at the soft edge."""
    if X < -10.0:
        raise InputDomainError("density_species_y is supported for X >= -10")
    ai = airy_many(X)[0]
    return 0.5 * airy_kernel(X, X) - 0.25 * float(ai) * float(ai_integral_above(X))


def _blind_w_tail_integrand(ts: np.ndarray, X: float) -> np.ndarray:
    """K(t, X) - J(t) with J(t) = int_X^inf du d/dt K(u, t)."""
    k_vals = _kernel_row(ts, X, derivative=False)
    # J(t) = int_0^inf Ai'(s+t) * AiInt(s+X) ds
    s_max = min(max(12.0 - X, 6.0), _DOMAIN - 0.5 - max(float(ts.max()), X))
    n_panels = max(8, int(np.ceil(s_max / 0.5)))
    nodes, weights = _panel_nodes(0.0, s_max, n_panels)
    aint = ai_integral_above(nodes + X)
    aipt = airy_many(ts[:, None] + nodes[None, :])[1]
    j_vals = aipt @ (weights * aint)
    return k_vals - j_vals


def density_blind(X: float, w: float = 0.0) -> float:
    """Parity-blind soft-edge density for Robin parameter w <= 0.

    Uses the integrated-by-parts form

        rho_b = K(X,X) + Ai(X)/2 * E_w(X)
                + w/4 * int_{-inf}^X e^{w(X-t)/2} [K(t,X) - J(t)] dt,

    E_w(X) = int_{-inf}^X e^{w(X-t)/2} Ai(t) dt, J as in the kernel-derivative
    tail.  At w = 0 the damped integrals vanish and E_0 = 1 - int_X^inf Ai,
    recovering the GOE soft-edge density without any slowly converging tail.
    """
    if w > 0.0:
        raise InputDomainError(
            "density_blind supports w <= 0 only; for w > 0 use Monte Carlo histograms"
        )
    if X < -8.0:
        raise InputDomainError("density_blind is supported for X >= -8")
    ai = float(airy_many(X)[0])
    k_diag = airy_kernel(X, X)
    if w == 0.0:
        e_w = 1.0 - float(ai_integral_above(X))
        return k_diag + 0.5 * ai * e_w
    depth_wanted = 2.0 * 10.0 * np.log(10.0) / abs(w)
    depth = min(depth_wanted, X + _DOMAIN - 1.0)
    if depth < depth_wanted:
        import warnings

        warnings.warn(
            "density_blind truncated before the damping factor reached 1e-10; "
            "accuracy is reduced for weakly negative w",
            stacklevel=2,
        )
    lo = X - depth
    # E_w by damped panels
    n_panels = max(12, int(np.ceil(depth / 0.5)))
    nodes, weights = _panel_nodes(lo, X, n_panels)
    damp = np.exp(w * (X - nodes) / 2.0)
    e_w = float(np.sum(weights * damp * airy_many(nodes)[0]))
    tail_vals = _blind_w_tail_integrand(nodes, X)
    third = float(np.sum(weights * damp * tail_vals))
    return k_diag + 0.5 * ai * e_w + 0.25 * w * third


def density_blind_direct(X: float, w: float, depth: float = 40.0) -> float:
    """Literal three-term form of the blind density, for cross-checks.

    Truncates the t integrals at the stated depth; the damped case w < 0 is
    accurate, while w = 0 retains an algebraically decaying tail and is only
    good to about 1e-3 in absolute terms.
    """
    if w > 0.0:
        raise InputDomainError("density_blind_direct supports w <= 0 only")
    if w < 0.0:
        depth = min(depth, 2.0 * 10.0 * np.log(10.0) / abs(w))
    lo = X - depth
    n_panels = max(16, int(np.ceil(depth / 0.4)))
    nodes, weights = _panel_nodes(lo, X, n_panels)
    damp = np.exp(w * (X - nodes) / 2.0)
    dK = np.array([airy_kernel_dx(t, X) for t in nodes])
    second = float(np.sum(weights * damp * dK))
    # inner double integral: int_X^inf du d/dt K(u, t) = J(t)
    k_vals = _kernel_row(nodes, X, derivative=False)
    j_vals = k_vals - _blind_w_tail_integrand(nodes, X)
    third = float(np.sum(weights * damp * j_vals))
    return 0.5 * airy_kernel(X, X) - 0.5 * second - 0.25 * w * third
