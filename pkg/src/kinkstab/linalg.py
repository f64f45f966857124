"""Self-contained numerical kernels.

Tridiagonal solves (Thomas algorithm with one iterative-refinement pass),
Sturm-count bisection for symmetric tridiagonal pencils A v = lambda W v
with positive diagonal weight, inverse-iteration eigenvectors, Householder
reduction of dense symmetric matrices, and composite Simpson quadrature.
No external eigensolver or linear-algebra package is used; numba compiles
the sequential recurrences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NearSingularError, StagnationError, ValidationError

__all__ = [
    "EigenPair",
    "DenseSymmetric",
    "thomas_solve",
    "sturm_count",
    "lowest_eigenpairs",
    "dense_sym_eigs",
    "tridiag_eigen_all",
    "simpson",
    "sign_changes",
]

_PIVMIN = 1e-300


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _sturm_count_kernel(diag, off, wdiag, lam):
    """Number of pencil eigenvalues strictly below lam.

    Counts negative pivots of the LDL^T factorization of A - lam W.  A zero
    pivot is replaced by -1e-300 (counting the boundary eigenvalue as
    below); intermediate infinities self-heal through IEEE arithmetic.
    """
    n = diag.shape[0]
    count = 0
    d = diag[0] - lam * wdiag[0]
    if d == 0.0:
        d = -_PIVMIN
    if d < 0.0:
        count += 1
    for i in range(1, n):
        d = (diag[i] - lam * wdiag[i]) - off[i - 1] * off[i - 1] / d
        if d == 0.0:
            d = -_PIVMIN
        if d < 0.0:
            count += 1
    return count


@njit(cache=True)
def _sturm_count_batch(diag, off, wdiag, lams, out):
    for j in range(lams.shape[0]):
        out[j] = _sturm_count_kernel(diag, off, wdiag, lams[j])


@njit(cache=True)
def _thomas_kernel(diag, off, wdiag, shift, rhs, x):
    """Solve (A - shift W) x = rhs; returns the smallest |pivot| seen.

    A is symmetric tridiagonal (single off-diagonal array), W diagonal.
    Plain LU sweeps without pivoting; the caller guards on the returned
    pivot magnitude.
    """
    n = diag.shape[0]
    cp = np.empty(n - 1)
    d0 = diag[0] - shift * wdiag[0]
    minpiv = abs(d0)
    if d0 == 0.0:
        return 0.0
    cp[0] = off[0] / d0
    x[0] = rhs[0] / d0
    for i in range(1, n):
        den = (diag[i] - shift * wdiag[i]) - off[i - 1] * cp[i - 1]
        apiv = abs(den)
        if apiv < minpiv:
            minpiv = apiv
        if den == 0.0:
            return 0.0
        if i < n - 1:
            cp[i] = off[i] / den
        x[i] = (rhs[i] - off[i - 1] * x[i - 1]) / den
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return minpiv


@njit(cache=True)
def _inverse_iteration_batch(diag, off, shifts, starts, n_iter):
    """Tridiagonal inverse iteration for many shifts at once (weight = I)."""
    n = diag.shape[0]
    m = shifts.shape[0]
    out = np.empty((n, m))
    ones = np.ones(n)
    x = np.empty(n)
    w = np.empty(n)
    for j in range(m):
        for i in range(n):
            x[i] = starts[i, j]
        for _ in range(n_iter):
            minpiv = _thomas_kernel(diag, off, ones, shifts[j], x, w)
            if minpiv == 0.0:
                break
            nrm = 0.0
            for i in range(n):
                nrm += w[i] * w[i]
            nrm = np.sqrt(nrm)
            if nrm == 0.0 or not np.isfinite(nrm):
                break
            for i in range(n):
                x[i] = w[i] / nrm
        for i in range(n):
            out[i, j] = x[i]
    return out


# ---------------------------------------------------------------------------
# operator-facing API
# ---------------------------------------------------------------------------

@dataclass
class EigenPair:
    """One converged eigenpair of a weighted tridiagonal problem.

    `residual` is ||A v - lambda W v||_2 / ||v||_2; `sturm_index` is the
    1-based position of the eigenvalue by Sturm count; `sign_changes`
    counts strict interior sign alternations of the eigenvector above the
    noise floor (Sturm oscillation diagnostic).
    """

    value: float
    vector: np.ndarray
    residual: float
    sturm_index: int
    sign_changes: int


def _pencil_arrays(op):
    return np.asarray(op.diag), np.asarray(op.off), np.asarray(op.weight)


def _similarity_arrays(op):
    """Entries of B = W^{-1/2} A W^{-1/2} (same spectrum, unit weight)."""
    diag, off, w = _pencil_arrays(op)
    return diag / w, off / np.sqrt(w[:-1] * w[1:])


def _gershgorin_bounds(d, e):
    r = np.zeros_like(d)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    return float(np.min(d - r)), float(np.max(d + r))


def tridiag_apply(diag, off, v):
    out = diag * v
    out[:-1] += off * v[1:]
    out[1:] += off * v[:-1]
    return out


def thomas_solve(op, shift: float, rhs: np.ndarray, refine: bool = True) -> np.ndarray:
    """Solve (A - shift W) x = rhs for a TridiagonalOperator.

    One pass of iterative refinement follows the factored solve.  Raises
    NearSingularError when a pivot falls below 1e-14 times the matrix
    scale; the caller is expected to move the shift.
    """
    diag, off, w = _pencil_arrays(op)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != diag.shape:
        raise ValidationError(f"rhs has shape {rhs.shape}, operator needs {diag.shape}")
    scale = float(np.max(np.abs(diag - shift * w)) + 2.0 * np.max(np.abs(off)))
    x = np.empty_like(rhs)
    minpiv = _thomas_kernel(diag, off, w, shift, rhs, x)
    if minpiv <= 1e-14 * scale:
        raise NearSingularError(
            f"pivot {minpiv:.3e} below threshold {1e-14 * scale:.3e} at shift {shift!r}"
        )
    if refine:
        shifted_diag = diag - shift * w
        resid = rhs - tridiag_apply(shifted_diag, off, x)
        corr = np.empty_like(x)
        _thomas_kernel(diag, off, w, shift, resid, corr)
        x = x + corr
    return x


def sturm_count(op, lam: float) -> int:
    """Number of weighted eigenvalues of A v = lambda W v strictly below lam."""
    diag, off, w = _pencil_arrays(op)
    return int(_sturm_count_kernel(diag, off, w, float(lam)))


def sign_changes(v: np.ndarray, floor_frac: float = 1e-9) -> int:
    """Strict sign alternations of v ignoring entries below 1e-9 * ||v||_inf."""
    floor = floor_frac * float(np.max(np.abs(v)))
    kept = v[np.abs(v) > floor]
    if kept.size < 2:
        return 0
    return int(np.sum(np.sign(kept[:-1]) * np.sign(kept[1:]) < 0))


def _bisect_one(diag, off, w, index, lo, hi, tol_scale=1e-10, max_iter=120):
    """Bisection for the (index+1)-th smallest pencil eigenvalue."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if _sturm_count_kernel(diag, off, w, mid) <= index:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol_scale * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


def lowest_eigenpairs(op, k: int, max_inverse_iters: int = 5) -> list[EigenPair]:
    """k smallest weighted eigenvalues with W-orthonormal eigenvectors.

    Eigenvalues by Sturm bisection to |interval| <= 1e-10 max(1, |lambda|);
    eigenvectors by inverse iteration at shift lambda + 1e-12 * scale,
    re-orthogonalized against the previously accepted vectors in the
    W-inner product.  Raises StagnationError if the relative residual
    stays above 1e-8 (or above the float64 floor ~eps * ||A|| on matrices
    whose norm makes 1e-8 unreachable).
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    diag, off, w = _pencil_arrays(op)
    bd, be = _similarity_arrays(op)
    lo0, hi0 = _gershgorin_bounds(bd, be)
    scale = max(abs(lo0), abs(hi0))
    residual_tol = max(1e-8, 4.0 * np.finfo(float).eps * scale)

    pairs: list[EigenPair] = []
    rng = np.random.default_rng(20240)
    for j in range(k):
        lam = _bisect_one(diag, off, w, j, lo0, hi0)
        # offset on the eigenvalue scale: the matrix-norm scale explodes for
        # weighted x-line problems whose weight decays exponentially
        shift = lam + 1e-12 * max(1.0, abs(lam))
        v = rng.standard_normal(diag.shape[0])
        residual = np.inf
        for _ in range(max_inverse_iters):
            rhs = w * v
            x = np.empty_like(v)
            minpiv = _thomas_kernel(diag, off, w, shift, rhs, x)
            if minpiv == 0.0:
                shift += 1e-12 * max(1.0, abs(lam))
                continue
            for prev in pairs:
                x -= (x * w * prev.vector).sum() * prev.vector
            nrm = np.sqrt((x * w * x).sum())
            if nrm == 0.0 or not np.isfinite(nrm):
                v = rng.standard_normal(diag.shape[0])
                continue
            v = x / nrm
            rayleigh = float((v * tridiag_apply(diag, off, v)).sum() / (v * w * v).sum())
            resid_vec = tridiag_apply(diag, off, v) - rayleigh * (w * v)
            residual = float(np.linalg.norm(resid_vec) / np.linalg.norm(v))
            if residual < residual_tol:
                break
        if residual >= residual_tol:
            raise StagnationError(
                f"inverse iteration stagnated at eigenvalue {lam!r} (residual {residual:.3e})"
            )
        if v[np.argmax(np.abs(v))] < 0.0:
            v = -v
        pairs.append(
            EigenPair(
                value=lam,
                vector=v,
                residual=residual,
                sturm_index=j + 1,
                sign_changes=sign_changes(v),
            )
        )
    return pairs


# ---------------------------------------------------------------------------
# full-spectrum machinery (tridiagonal, then dense via Householder)
# ---------------------------------------------------------------------------

def _bisect_all(d, e, max_iter=110):
    """All eigenvalues of an unweighted symmetric tridiagonal, ascending.

    Vectorized bisection: every eigenvalue index keeps its own bracket and
    all midpoints are counted in one batched Sturm sweep per round.  Runs
    until every bracket satisfies |hi - lo| <= 1e-13 max(1, |lambda|), so
    near-zero eigenvalues of large-norm matrices stay resolved.
    """
    n = d.shape[0]
    glo, ghi = _gershgorin_bounds(d, e)
    lo = np.full(n, glo)
    hi = np.full(n, ghi)
    ones = np.ones(n)
    counts = np.empty(n, dtype=np.int64)
    idx = np.arange(n)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        _sturm_count_batch(d, e, ones, mid, counts)
        take_lo = counts <= idx
        lo = np.where(take_lo, mid, lo)
        hi = np.where(take_lo, hi, mid)
        if np.all(hi - lo <= 1e-13 * np.maximum(1.0, np.abs(mid))):
            break
    return 0.5 * (lo + hi)


def tridiag_eigen_all(d, e, want_vectors: bool = True, cluster_gap_frac: float = 1e-10):
    """Full eigendecomposition of an unweighted symmetric tridiagonal matrix.

    Eigenvalues by batched bisection; eigenvectors by two rounds of inverse
    iteration, with Gram-Schmidt inside clusters whose gaps fall below
    cluster_gap_frac times the spectral scale.
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    vals = _bisect_all(d, e)
    if not want_vectors:
        return vals, None
    n = d.shape[0]
    scale = max(1.0, float(np.max(np.abs(vals))))
    shifts = vals + 1e-12 * scale
    rng = np.random.default_rng(777)
    starts = rng.standard_normal((n, n))
    vecs = _inverse_iteration_batch(d, e, shifts, starts, 2)
    gap_tol = cluster_gap_frac * scale
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and vals[stop] - vals[stop - 1] < gap_tol:
            stop += 1
        if stop - start > 1:
            block = vecs[:, start:stop]
            q, _ = np.linalg.qr(block)
            vecs[:, start:stop] = q
        start = stop
    return vals, vecs


@njit(cache=True)
def _householder_reduce(a):
    """In-place symmetric tridiagonalization; returns (diag, off, betas).

    Reflectors are stored below the first subdiagonal of `a` for the
    back-transform.
    """
    n = a.shape[0]
    betas = np.zeros(n)
    for k in range(n - 2):
        xnorm2 = 0.0
        for i in range(k + 1, n):
            xnorm2 += a[i, k] * a[i, k]
        if xnorm2 == 0.0:
            continue
        alpha = np.sqrt(xnorm2)
        if a[k + 1, k] > 0.0:
            alpha = -alpha
        # v = x - alpha e1, stored back into column k
        a[k + 1, k] -= alpha
        vnorm2 = 0.0
        for i in range(k + 1, n):
            vnorm2 += a[i, k] * a[i, k]
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        betas[k] = beta
        # p = beta * A v on the trailing block
        p = np.zeros(n - k - 1)
        for i in range(k + 1, n):
            s = 0.0
            for j in range(k + 1, n):
                s += a[i, j] * a[j, k]
            p[i - k - 1] = beta * s
        # K = beta/2 * v^T p ; q = p - K v
        kv = 0.0
        for i in range(k + 1, n):
            kv += a[i, k] * p[i - k - 1]
        kv *= 0.5 * beta
        for i in range(k + 1, n):
            p[i - k - 1] -= kv * a[i, k]
        # A <- A - q v^T - v q^T
        for i in range(k + 1, n):
            qi = p[i - k - 1]
            vi = a[i, k]
            for j in range(k + 1, n):
                a[i, j] -= qi * a[j, k] + vi * p[j - k - 1]
        a[k, k + 1] = alpha
    diag = np.empty(n)
    off = np.empty(n - 1)
    for i in range(n):
        diag[i] = a[i, i]
    for i in range(n - 1):
        off[i] = a[i, i + 1]
    return diag, off, betas


@njit(cache=True)
def _householder_backtransform(a, betas, vecs):
    """Apply the accumulated reflectors to tridiagonal eigenvectors."""
    n = a.shape[0]
    m = vecs.shape[1]
    for k in range(n - 3, -1, -1):
        beta = betas[k]
        if beta == 0.0:
            continue
        for j in range(m):
            s = 0.0
            for i in range(k + 1, n):
                s += a[i, k] * vecs[i, j]
            s *= beta
            for i in range(k + 1, n):
                vecs[i, j] -= s * a[i, k]


@dataclass
class DenseSymmetric:
    """Dense symmetric matrix in packed lower-triangular storage."""

    n: int
    packed: np.ndarray

    @classmethod
    def from_dense(cls, m: np.ndarray) -> "DenseSymmetric":
        m = np.asarray(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError("DenseSymmetric needs a square matrix")
        n = m.shape[0]
        idx = np.tril_indices(n)
        return cls(n=n, packed=((m + m.T) * 0.5)[idx].copy())

    def full(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        idx = np.tril_indices(self.n)
        out[idx] = self.packed
        out = out + out.T
        out[np.diag_indices(self.n)] *= 0.5
        return out


def dense_sym_eigs(m, want_vectors: bool = True) -> list[EigenPair]:
    """Full spectrum of a dense symmetric matrix (order <= 4001).

    Householder reduction to tridiagonal form followed by the bisection /
    inverse-iteration machinery; eigenvectors are back-transformed through
    the stored reflectors.
    """
    if isinstance(m, DenseSymmetric):
        a = m.full()
    else:
        a = np.array(m, dtype=float)
        a = 0.5 * (a + a.T)
    n = a.shape[0]
    if n > 4001:
        raise ValidationError(f"dense_sym_eigs guards at order 4001, got {n}")
    if n == 1:
        v = np.ones(1)
        return [EigenPair(float(a[0, 0]), v, 0.0, 1, 0)]
    work = a.copy()
    d, e, betas = _householder_reduce(work)
    vals, vecs = tridiag_eigen_all(d, e, want_vectors=want_vectors)
    pairs: list[EigenPair] = []
    if not want_vectors:
        for j, lam in enumerate(vals):
            pairs.append(EigenPair(float(lam), np.empty(0), np.nan, j + 1, 0))
        return pairs
    _householder_backtransform(work, betas, vecs)
    for j, lam in enumerate(vals):
        v = vecs[:, j]
        v = v / np.linalg.norm(v)
        if v[np.argmax(np.abs(v))] < 0.0:
            v = -v
        residual = float(np.linalg.norm(a @ v - lam * v))
        pairs.append(EigenPair(float(lam), v, residual, j + 1, sign_changes(v)))
    return pairs


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def simpson(values: np.ndarray, h: float) -> float:
    """Composite Simpson rule on a uniform grid.

    Needs at least 3 nodes.  An odd interval count is handled by closing
    the last three intervals with the 3/8 rule; the rule is exact for
    cubics on even counts.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n < 3:
        raise ValidationError("simpson needs at least 3 nodes")
    m = n - 1  # interval count
    total = 0.0
    if m % 2 == 1:
        if m == 3:
            return float((3.0 * h / 8.0) * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]))
        total += (3.0 * h / 8.0) * (values[-4] + 3.0 * values[-3] + 3.0 * values[-2] + values[-1])
        values = values[:-3]
        n = values.shape[0]
    acc = values[0] + values[-1] + 4.0 * values[1:-1:2].sum() + 2.0 * values[2:-2:2].sum()
    return float(total + acc * h / 3.0)
