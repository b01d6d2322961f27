"""Lowest eigenpairs of symmetric tridiagonal operators.

Eigenvalues come from Sturm-sequence bisection (count of sign agreements in
the guarded pivot recurrence), eigenvectors from inverse iteration with a
partially pivoted tridiagonal LU.  Everything is deterministic: fixed
brackets from Gershgorin bounds, fixed start vectors, no randomness, so
repeated runs are bit-identical.  The hot kernels are numba-compiled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import NumericalError
from .grid import TridiagonalOperator

# Pivot guard for the Sturm recurrence; pivots smaller in magnitude are
# replaced by +-PIVOT_FLOOR preserving sign (zero counts as positive).
PIVOT_FLOOR = 1e-300

# Bisection stops when the bracket is narrower than this times max(1, |lam|).
# Tighter than the 1e-10 contract so that downstream finite-difference
# checks of eigenvalue gradients are not limited by bracket quantization.
BISECT_RELATIVE_WIDTH = 1e-13


@dataclass(frozen=True)
class EigenPair:
    """One converged eigenvalue with its grid-normalized eigenvector."""

    value: float
    vector: np.ndarray = field(repr=False, compare=False)


@njit(cache=True)
def _sturm_count(diag, off_sq, lam):
    count = 0
    d = diag[0] - lam
    if -PIVOT_FLOOR < d < PIVOT_FLOOR:
        d = -PIVOT_FLOOR if d < 0.0 else PIVOT_FLOOR
    if d < 0.0:
        count += 1
    for i in range(1, diag.shape[0]):
        d = diag[i] - lam - off_sq[i - 1] / d
        if -PIVOT_FLOOR < d < PIVOT_FLOOR:
            d = -PIVOT_FLOOR if d < 0.0 else PIVOT_FLOOR
        if d < 0.0:
            count += 1
    return count


@njit(cache=True)
def _gershgorin(diag, off):
    n = diag.shape[0]
    lo = diag[0]
    hi = diag[0]
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(off[i - 1])
        if i < n - 1:
            r += abs(off[i])
        if diag[i] - r < lo:
            lo = diag[i] - r
        if diag[i] + r > hi:
            hi = diag[i] + r
    return lo, hi


@njit(cache=True)
def _batch_counts(diag, off_sq, mids, counts):
    """Sturm counts for several shifts in one pass over the matrix.

    The k recurrences are independent, so the inner loop pipelines the
    divisions that make the one-shift recurrence latency-bound.
    """
    k = mids.shape[0]
    n = diag.shape[0]
    d = np.empty(k)
    for j in range(k):
        counts[j] = 0
        dj = diag[0] - mids[j]
        if -PIVOT_FLOOR < dj < PIVOT_FLOOR:
            dj = -PIVOT_FLOOR if dj < 0.0 else PIVOT_FLOOR
        if dj < 0.0:
            counts[j] += 1
        d[j] = dj
    for i in range(1, n):
        for j in range(k):
            dj = diag[i] - mids[j] - off_sq[i - 1] / d[j]
            if -PIVOT_FLOOR < dj < PIVOT_FLOOR:
                dj = -PIVOT_FLOOR if dj < 0.0 else PIVOT_FLOOR
            if dj < 0.0:
                counts[j] += 1
            d[j] = dj


@njit(cache=True)
def _bisect_lowest(diag, off_sq, off, k):
    glo, ghi = _gershgorin(diag, off)
    # Widen so the strict count at the endpoints is unambiguous.
    pad = 1e-12 * (abs(glo) + abs(ghi) + 1.0)
    glo -= pad
    ghi += pad
    lo = np.full(k, glo)
    hi = np.full(k, ghi)
    mids = np.empty(k)
    counts = np.empty(k, dtype=np.int64)
    for _ in range(250):
        active = 0
        prev = -np.inf
        for j in range(k):  # brackets are ordered, so dedup consecutive mids
            if hi[j] - lo[j] > BISECT_RELATIVE_WIDTH * max(1.0, abs(lo[j]), abs(hi[j])):
                mid = 0.5 * (lo[j] + hi[j])
                if lo[j] < mid < hi[j] and mid != prev:
                    mids[active] = mid
                    active += 1
                    prev = mid
        if active == 0:
            break
        _batch_counts(diag, off_sq, mids[:active], counts[:active])
        # Every count bounds every bracket: count(m) = c means the c lowest
        # eigenvalues lie below m and the rest at or above it.
        for a in range(active):
            m = mids[a]
            c = counts[a]
            for j in range(k):
                if j < c:
                    if m < hi[j]:
                        hi[j] = m
                else:
                    if m > lo[j]:
                        lo[j] = m
    out = np.empty(k)
    for j in range(k):
        out[j] = 0.5 * (lo[j] + hi[j])
    return out


@njit(cache=True)
def _lu_factor_shifted(diag, off, lam, tiny):
    """Partially pivoted LU of (T - lam*I); returns (dl, d, du, du2, swapped)."""
    n = diag.shape[0]
    d = diag - lam
    dl = off.copy() if n > 1 else np.empty(0)
    du = off.copy() if n > 1 else np.empty(0)
    du2 = np.zeros(max(n - 2, 0))
    swapped = np.zeros(max(n - 1, 0), dtype=np.uint8)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if -tiny < d[i] < tiny:
                d[i] = -tiny if d[i] < 0.0 else tiny
            fact = dl[i] / d[i]
            dl[i] = fact
            d[i + 1] -= fact * du[i]
        else:
            swapped[i] = 1
            fact = d[i] / dl[i]
            d[i] = dl[i]
            tmp = d[i + 1]
            d[i + 1] = du[i] - fact * tmp
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            du[i] = tmp
            dl[i] = fact
    if -tiny < d[n - 1] < tiny:
        d[n - 1] = -tiny if d[n - 1] < 0.0 else tiny
    return dl, d, du, du2, swapped


@njit(cache=True)
def _lu_solve_inplace(dl, d, du, du2, swapped, b):
    n = d.shape[0]
    for i in range(n - 1):
        if swapped[i] == 0:
            b[i + 1] -= dl[i] * b[i]
        else:
            tmp = b[i]
            b[i] = b[i + 1]
            b[i + 1] = tmp - dl[i] * b[i]
    b[n - 1] /= d[n - 1]
    if n > 1:
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i]


@njit(cache=True)
def _residual_norm(diag, off, lam, v):
    n = diag.shape[0]
    acc = 0.0
    for i in range(n):
        r = (diag[i] - lam) * v[i]
        if i > 0:
            r += off[i - 1] * v[i - 1]
        if i < n - 1:
            r += off[i] * v[i + 1]
        acc += r * r
    return np.sqrt(acc)


@njit(cache=True)
def _inverse_iteration(diag, off, lam, prev, max_iters, tol):
    n = diag.shape[0]
    scale = 0.0
    for i in range(n):
        a = abs(diag[i])
        if i > 0:
            a += abs(off[i - 1])
        if i < n - 1:
            a += abs(off[i])
        if a > scale:
            scale = a
    tiny = 1e-30 * max(scale, 1.0)
    dl, d, du, du2, swapped = _lu_factor_shifted(diag, off, lam, tiny)

    v = np.ones(n)
    v /= np.sqrt(n)
    resid = np.inf
    for it in range(max_iters):
        if it == 8:
            # Deterministic reseed: the all-ones start has no weight on
            # antisymmetric modes; inject full-spectrum content if stuck.
            for i in range(n):
                v[i] = 0.5 + ((i * 48271 + 11) % 65536) / 65536.0
        _lu_solve_inplace(dl, d, du, du2, swapped, v)
        for p in range(prev.shape[0]):
            dot = 0.0
            for i in range(n):
                dot += prev[p, i] * v[i]
            for i in range(n):
                v[i] -= dot * prev[p, i]
        nrm = 0.0
        for i in range(n):
            nrm += v[i] * v[i]
        nrm = np.sqrt(nrm)
        if nrm == 0.0 or not np.isfinite(nrm):
            v = np.ones(n) / np.sqrt(n)
            continue
        v /= nrm
        resid = _residual_norm(diag, off, lam, v)
        if resid <= tol:
            return v, resid, it + 1
    return v, resid, max_iters


def count_below(op: TridiagonalOperator, lam: float) -> int:
    """Number of eigenvalues strictly less than lam (Sturm sign count)."""
    return int(_sturm_count(op.diagonal, op.off_diagonal ** 2, float(lam)))


def lowest_eigenvalues(op: TridiagonalOperator, k: int) -> np.ndarray:
    """The k smallest eigenvalues, ascending, by bisection on count_below."""
    if not 1 <= k <= op.size:
        raise ValueError(f"k must be in [1, {op.size}], got {k}")
    return _bisect_lowest(op.diagonal, op.off_diagonal ** 2, op.off_diagonal, k)


def _operator_scale(op: TridiagonalOperator) -> float:
    off = np.abs(op.off_diagonal)
    pad = np.zeros(1)
    r = np.concatenate([pad, off]) + np.concatenate([off, pad])
    return float(np.max(np.abs(op.diagonal) + r))


def _fix_sign(v: np.ndarray) -> np.ndarray:
    mid = (v.size - 1) // 2
    peak = np.max(np.abs(v))
    if abs(v[mid]) > 1e-12 * peak:
        return v if v[mid] > 0 else -v
    nz = np.nonzero(np.abs(v) > 1e-12 * peak)[0]
    lead = nz[0] if nz.size else mid
    return v if v[lead] > 0 else -v


def eigenvector(op: TridiagonalOperator, lam: float, dx: float = 1.0,
                previous=()) -> EigenPair:
    """Eigenvector for a converged eigenvalue, by inverse iteration.

    `previous` holds EigenPairs already computed for this operator; vectors
    whose eigenvalue is within the cluster tolerance of lam are projected
    out every iteration so degenerate pairs come out orthogonal.  The
    result is normalized so sum(v^2) * dx = 1 and sign-fixed (center node
    positive, falling back to the first nonzero entry).
    """
    lam = float(lam)
    cluster_tol = 1e-7 * max(1.0, abs(lam))
    prev_rows = [p.vector * np.sqrt(dx) for p in previous
                 if abs(p.value - lam) <= cluster_tol]
    prev = np.array(prev_rows) if prev_rows else np.empty((0, op.size))
    scale = _operator_scale(op)
    tol = 200.0 * np.finfo(float).eps * max(scale, 1.0)
    v, resid, iters = _inverse_iteration(op.diagonal, op.off_diagonal, lam,
                                         prev, 40, tol)
    # Accept anything within the documented residual contract; the tight
    # tolerance above is normally reached in 2-3 iterations.
    if resid > 1e-8 * max(scale, 1.0):
        raise NumericalError(
            f"inverse iteration stalled: lam={lam!r}, residual={resid:.3e}, "
            f"tolerance={1e-8 * max(scale, 1.0):.3e}, iterations={iters}"
        )
    v = _fix_sign(v / np.sqrt(dx))
    return EigenPair(lam, v)


def lowest_eigenpairs(op: TridiagonalOperator, k: int, dx: float = 1.0):
    """Convenience: k smallest eigenvalues and their eigenvectors.

    Returns (values, vectors) with vectors stacked as rows.
    """
    values = lowest_eigenvalues(op, k)
    pairs: list[EigenPair] = []
    for lam in values:
        pairs.append(eigenvector(op, lam, dx=dx, previous=pairs))
    vectors = np.array([p.vector for p in pairs])
    return values, vectors
