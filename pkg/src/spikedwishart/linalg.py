"""Deterministic linear algebra for tridiagonal and bidiagonal-pencil spectra.

Everything here is pure: symmetric tridiagonal eigenvalues by bisection on
the Sturm sign count, first eigenvector components from characteristic
polynomial ratios, and the zeros of the monic polynomials

    B_j(x) = (x - a_j) B_{j-1}(x) - b_{j-1} x B_{j-2}(x),   B_0 = 1, b_0 = 0,

which are the generalized eigenvalues of the bidiagonal pencil (L, M) with
L carrying a_1..a_N on the diagonal and a unit superdiagonal, and M carrying
a unit diagonal and -b_1..-b_{N-1} on the subdiagonal.

The bisection kernels accept leading batch axes so Monte Carlo drivers can
solve many small problems in one vectorized sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError, NumericalError

_TIE_TOL = 1e-13


def _as_float_vector(values, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.ndim != 1:
        raise InputDomainError(f"{name} must be one-dimensional")
    if arr.size and not np.all(np.isfinite(arr)):
        raise InputDomainError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix, diag[0] being the top-left entry."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = _as_float_vector(self.diag, "diag")
        off = np.asarray(self.offdiag, dtype=float).reshape(-1)
        if off.size and not np.all(np.isfinite(off)):
            raise InputDomainError("offdiag contains non-finite entries")
        if off.size != max(diag.size - 1, 0):
            raise InputDomainError("offdiag must have length N-1")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    @property
    def size(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        n = self.size
        out = np.diag(self.diag)
        idx = np.arange(n - 1)
        out[idx, idx + 1] = self.offdiag
        out[idx + 1, idx] = self.offdiag
        return out


@dataclass(frozen=True)
class BidiagonalPencil:
    """Entries of the pencil (L, M); b_0 = 0 by convention."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _as_float_vector(self.a, "a")
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if b.size != max(a.size - 1, 0):
            raise InputDomainError("b must have length N-1")
        if b.size and not np.all(np.isfinite(b)):
            raise InputDomainError("b contains non-finite entries")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def size(self) -> int:
        return self.a.size

    def dense_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """The (L, M) matrices whose pencil determinant is B_N."""
        n = self.size
        L = np.diag(self.a)
        M = np.eye(n)
        idx = np.arange(n - 1)
        L[idx, idx + 1] = 1.0
        M[idx + 1, idx] = -self.b
        return L, M


@dataclass(frozen=True)
class SpectrumSample:
    """Strictly decreasing eigenvalues plus RNG provenance."""

    values: np.ndarray
    seed: object = None
    construction: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if vals.size and not np.all(np.isfinite(vals)):
            raise InputDomainError("spectrum contains non-finite values")
        if vals.size > 1 and not np.all(np.diff(vals) < 0):
            raise InputDomainError("spectrum must be strictly decreasing")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def ascending(self) -> np.ndarray:
        return self.values[::-1].copy()


# ----------------------------------------------------------------------
# Sturm-count bisection for symmetric tridiagonal matrices
# ----------------------------------------------------------------------

def sturm_count(diag: np.ndarray, off_sq: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift x.

    diag has shape (..., N), off_sq shape (..., N-1); x broadcasts against
    the leading axes.  Uses the LDL^T pivot recurrence with the LAPACK-style
    pivot floor so zero pivots cannot poison the count.
    """
    diag = np.asarray(diag, dtype=float)
    off_sq = np.asarray(off_sq, dtype=float)
    x = np.asarray(x, dtype=float)
    n = diag.shape[-1]
    scale = np.abs(off_sq).max() if off_sq.size else 1.0
    pivmin = np.finfo(float).tiny * max(1.0, scale)
    d = diag[..., 0] - x
    d = np.where(np.abs(d) < pivmin, -pivmin, d)
    count = (d < 0).astype(np.int64)
    for i in range(1, n):
        d = diag[..., i] - x - off_sq[..., i - 1] / d
        d = np.where(np.abs(d) < pivmin, -pivmin, d)
        count += d < 0
    return count


def _gershgorin_bounds(diag: np.ndarray, off: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = diag.shape[-1]
    radius = np.zeros_like(diag)
    if n > 1:
        a = np.abs(off)
        radius[..., :-1] += a
        radius[..., 1:] += a
    lo = (diag - radius).min(axis=-1)
    hi = (diag + radius).max(axis=-1)
    span = np.maximum(hi - lo, 1.0) * 1e-12
    return lo - span, hi + span


def tridiag_eigenvalues_batch(
    diag: np.ndarray,
    off: np.ndarray,
    indices: np.ndarray | None = None,
    rtol: float = 1e-14,
) -> np.ndarray:
    """Ascending eigenvalues (selected by 0-based index) via Sturm bisection.

    diag: (..., N); off: (..., N-1); indices defaults to all of 0..N-1.
    Returns shape (..., len(indices)).
    """
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    n = diag.shape[-1]
    if indices is None:
        indices = np.arange(n)
    indices = np.asarray(indices, dtype=np.int64)
    off_sq = off * off
    lo, hi = _gershgorin_bounds(diag, off)
    batch = diag.shape[:-1]
    lo = np.broadcast_to(lo[..., None], batch + (indices.size,)).copy()
    hi = np.broadcast_to(hi[..., None], batch + (indices.size,)).copy()
    d_b = diag[..., None, :]
    s_b = off_sq[..., None, :] if off_sq.size else off_sq.reshape(batch + (1, 0))
    want = indices + 1  # eigenvalue k (ascending) has count >= k+1 above it
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        counts = sturm_count(d_b, s_b, mid)
        above = counts >= want
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        width = hi - lo
        if np.all(width <= rtol * (1.0 + np.abs(lo) + np.abs(hi))):
            break
    return 0.5 * (lo + hi)


def _split_blocks(off: np.ndarray) -> list[tuple[int, int]]:
    """Index ranges of irreducible blocks (split at exact zero couplings)."""
    cuts = np.flatnonzero(off == 0.0)
    starts = np.concatenate(([0], cuts + 1))
    stops = np.concatenate((cuts + 1, [off.size + 1]))
    return list(zip(starts.tolist(), stops.tolist()))


def tridiag_eigenvalues(T: SymTridiag, construction: str = "", seed=None) -> SpectrumSample:
    """All eigenvalues of T, strictly decreasing.

    Exact zeros on the off-diagonal split the matrix into irreducible blocks
    that are solved independently.  A tie within 1e-13 of the spectral scale
    is reported as a numerical error rather than silently merged.
    """
    if T.size == 0:
        raise InputDomainError("empty matrix")
    vals = []
    for start, stop in _split_blocks(T.offdiag):
        d = T.diag[start:stop]
        e = T.offdiag[start : stop - 1]
        vals.append(tridiag_eigenvalues_batch(d[None, :], e[None, :])[0])
    merged = np.sort(np.concatenate(vals))[::-1]
    scale = max(1.0, float(np.abs(merged).max()))
    if merged.size > 1 and np.any(-np.diff(merged) <= _TIE_TOL * scale):
        raise NumericalError(
            "degenerate eigenvalue tie (gap below 1e-13 of scale); "
            "inputs from samplers should be almost surely simple"
        )
    return SpectrumSample(values=merged, seed=seed, construction=construction)


# ----------------------------------------------------------------------
# First eigenvector components
# ----------------------------------------------------------------------

def _charpoly_log(diag: np.ndarray, off_sq: np.ndarray, x: float) -> tuple[float, float]:
    """(sign, log|p|) of det(xI - T) evaluated by the scaled recurrence."""
    p_prev = 1.0
    p = x - diag[0]
    log_scale = 0.0
    for i in range(1, diag.size):
        p_next = (x - diag[i]) * p - off_sq[i - 1] * p_prev
        p_prev, p = p, p_next
        m = max(abs(p), abs(p_prev))
        if m > 1e150:
            p /= m
            p_prev /= m
            log_scale += np.log(m)
        elif 0.0 < m < 1e-150:
            p /= m
            p_prev /= m
            log_scale += np.log(m)
    if p == 0.0:
        return 0.0, -np.inf
    return np.sign(p), np.log(abs(p)) + log_scale


def tridiag_first_components(T: SymTridiag, eigenvalues: SpectrumSample | None = None) -> np.ndarray:
    """Nonnegative first components q_j of the normalized eigenvectors.

    Ordered to match the decreasing eigenvalues.  Uses the classical ratio

        q_k^2 = det(lam_k I - T_{2:N}) / prod_{j != k} (lam_k - lam_j),

    evaluated in log space so large N does not overflow.  Requires an
    unreduced matrix (all off-diagonal entries nonzero) so the eigenvalues
    are simple.
    """
    n = T.size
    if n == 1:
        return np.array([1.0])
    if np.any(T.offdiag == 0.0):
        raise InputDomainError(
            "matrix is reducible (zero off-diagonal); split into blocks before "
            "requesting eigenvector components"
        )
    if eigenvalues is None:
        eigenvalues = tridiag_eigenvalues(T)
    lam = eigenvalues.values
    sub_diag = T.diag[1:]
    sub_off_sq = T.offdiag[1:] ** 2
    q_sq = np.empty(n)
    for k in range(n):
        sign_num, log_num = _charpoly_log(sub_diag, sub_off_sq, lam[k])
        gaps = lam[k] - np.delete(lam, k)
        sign_den = np.prod(np.sign(gaps))
        log_den = np.sum(np.log(np.abs(gaps)))
        val = sign_num * sign_den * np.exp(log_num - log_den)
        q_sq[k] = val
    floor = -1e-10 * max(1.0, np.abs(q_sq).max())
    if np.any(q_sq < floor):
        raise NumericalError("negative squared eigenvector component; matrix may be ill-conditioned")
    q_sq = np.clip(q_sq, 0.0, None)
    total = q_sq.sum()
    if not (0.5 < total < 2.0):
        raise NumericalError(f"first-component normalization drifted: sum q^2 = {total!r}")
    return np.sqrt(q_sq / total)


# ----------------------------------------------------------------------
# Bidiagonal pencil polynomials and their zeros
# ----------------------------------------------------------------------

def recurrence_eval(p: BidiagonalPencil, x) -> tuple[np.ndarray, np.ndarray]:
    """Values (B_N(x), B_{N-1}(x)) of the pencil characteristic polynomials.

    Vectorized over x.  B_j equals det(x M_j - L_j) for the leading j-by-j
    blocks of the pencil, which the three-term recurrence reproduces.
    """
    xv = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xv)):
        raise InputDomainError("x must be finite")
    b_prev = np.ones_like(xv)
    b_cur = xv - p.a[0]
    for j in range(1, p.size):
        b_next = (xv - p.a[j]) * b_cur - p.b[j - 1] * xv * b_prev
        b_prev, b_cur = b_cur, b_next
    return b_cur, b_prev


def _recurrence_sign_scaled(a: np.ndarray, b: np.ndarray, level: int, x: np.ndarray) -> np.ndarray:
    """Sign of B_level(x), batched over x, with per-step rescaling."""
    b_prev = np.ones_like(x)
    b_cur = x - a[..., 0]
    for j in range(1, level):
        b_next = (x - a[..., j]) * b_cur - b[..., j - 1] * x * b_prev
        b_prev, b_cur = b_cur, b_next
        m = np.maximum(np.abs(b_cur), np.abs(b_prev))
        big = m > 1e120
        if np.any(big):
            inv = np.where(big, 1.0 / np.where(big, m, 1.0), 1.0)
            b_cur = b_cur * inv
            b_prev = b_prev * inv
    return b_cur


def pencil_zero_ladder(a: np.ndarray, b: np.ndarray, rtol: float = 1e-14) -> list[np.ndarray]:
    """Zeros of B_1, ..., B_N for batched pencil entries.

    a: (..., N), b: (..., N-1), all positive.  Level j zeros strictly
    interlace level j-1 zeros with an extra root below the old minimum and
    above the old maximum; that structure supplies guaranteed brackets.
    Returns a list whose j-th entry has shape (..., j+1), ascending.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    batch = a.shape[:-1]
    n = a.shape[-1]
    upper = a.max(axis=-1) + (b.sum(axis=-1) if b.size else 0.0) + 1.0
    levels = [a[..., :1].copy()]
    for j in range(2, n + 1):
        prev = levels[-1]
        hi_top = np.maximum(np.broadcast_to(upper, batch), prev[..., -1] + 1.0)
        sign_top = _recurrence_sign_scaled(a, b, j, hi_top)
        for _ in range(60):
            bad = sign_top <= 0
            if not np.any(bad):
                break
            hi_top = np.where(bad, prev[..., -1] + 2.0 * (hi_top - prev[..., -1]), hi_top)
            sign_top = _recurrence_sign_scaled(a, b, j, hi_top)
        else:
            raise NumericalError("failed to bracket the top pencil zero")
        lo = np.concatenate([np.zeros(batch + (1,)), prev], axis=-1)
        hi = np.concatenate([prev, hi_top[..., None]], axis=-1)
        f_lo = _recurrence_sign_scaled(a[..., None, :], b[..., None, :], j, lo)
        f_hi = _recurrence_sign_scaled(a[..., None, :], b[..., None, :], j, hi)
        if np.any(f_lo * f_hi >= 0):
            k = np.argwhere(f_lo * f_hi >= 0)
            raise NumericalError(f"pencil root not bracketed on interval index {k[0].tolist()}")
        for _ in range(110):
            mid = 0.5 * (lo + hi)
            f_mid = _recurrence_sign_scaled(a[..., None, :], b[..., None, :], j, mid)
            move_hi = f_mid * f_hi > 0
            hi = np.where(move_hi, mid, hi)
            f_hi = np.where(move_hi, f_mid, f_hi)
            lo = np.where(move_hi, lo, mid)
            width = hi - lo
            if np.all(width <= rtol * (1.0 + np.abs(hi))):
                break
        levels.append(0.5 * (lo + hi))
    return levels


def pencil_eigenvalues(p: BidiagonalPencil) -> tuple[SpectrumSample, SpectrumSample]:
    """Zeros of (B_N, B_{N-1}), each strictly decreasing, interlaced.

    For N = 1 the second spectrum is empty.
    """
    if np.any(p.a <= 0) or (p.b.size and np.any(p.b <= 0)):
        raise InputDomainError("pencil entries must be positive")
    levels = pencil_zero_ladder(p.a[None, :], p.b[None, :])
    zn = np.sort(levels[-1][0])[::-1]
    znm1 = np.sort(levels[-2][0])[::-1] if p.size > 1 else np.array([])
    if p.size > 1:
        merged = np.empty(zn.size + znm1.size)
        merged[0::2] = zn
        merged[1::2] = znm1
        if not np.all(np.diff(merged) < 0):
            raise NumericalError("pencil zero sets fail to interlace")
    x = SpectrumSample(values=zn, construction="pencil")
    y = SpectrumSample(values=znm1, construction="pencil-minor") if p.size > 1 else SpectrumSample(values=znm1)
    return x, y
