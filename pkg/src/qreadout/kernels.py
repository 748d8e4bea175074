"""Hot numerical kernels, each in two flavours: numba ``@njit`` and pure numpy.

The flavour is fixed at import time by :mod:`qreadout._accel` (numba when
available, unless ``QREADOUT_NO_NUMBA`` is set).  The numpy fallbacks are
vectorized, not line-by-line transliterations, so they stay usable on real
workloads; ``benchmarks/bench_kernels.py`` measures the gap.

Kernels here are deterministic and allocation-light.  All randomness stays
outside (see :mod:`qreadout.simulate`): callers pass explicit subset masks,
pre-drawn rows, or frequency tables.
"""

from __future__ import annotations

import numpy as np

from ._accel import HAS_NUMBA

if HAS_NUMBA:
    from numba import njit

MLE_PROBABILITY_FLOOR = 1e-12
MLE_EIGENVALUE_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# max over subset sums of the operator norm (operational distance core)
# ---------------------------------------------------------------------------

def _max_subset_norm_numpy(diffs: np.ndarray, masks: np.ndarray, chunk: int = 2048) -> float:
    n, d, _ = diffs.shape
    flat = diffs.reshape(n, d * d)
    shifts = np.arange(n, dtype=np.int64)
    best = 0.0
    for start in range(0, masks.shape[0], chunk):
        sel = ((masks[start:start + chunk, None] >> shifts) & 1).astype(np.float64)
        acc = (sel @ flat).reshape(-1, d, d)
        w = np.linalg.eigvalsh(acc)
        if w.size:
            best = max(best, float(np.abs(w[:, [0, -1]]).max()))
    return best


def _max_subset_norm_diag_numpy(diag_diffs: np.ndarray, masks: np.ndarray,
                                chunk: int = 65536) -> float:
    n = diag_diffs.shape[0]
    shifts = np.arange(n, dtype=np.int64)
    best = 0.0
    for start in range(0, masks.shape[0], chunk):
        sel = ((masks[start:start + chunk, None] >> shifts) & 1).astype(np.float64)
        acc = sel @ diag_diffs
        if acc.size:
            best = max(best, float(np.abs(acc).max()))
    return best


if HAS_NUMBA:

    @njit(cache=True)
    def _max_subset_norm_numba(diffs, masks):
        n, d, _ = diffs.shape
        acc = np.empty((d, d), dtype=np.complex128)
        best = 0.0
        for idx in range(masks.shape[0]):
            m = masks[idx]
            acc[:] = 0.0
            for i in range(n):
                if (m >> i) & 1:
                    acc += diffs[i]
            w = np.linalg.eigvalsh(acc)
            v = abs(w[0])
            if abs(w[d - 1]) > v:
                v = abs(w[d - 1])
            if v > best:
                best = v
        return best

    @njit(cache=True)
    def _max_subset_norm_diag_numba(diag_diffs, masks):
        n, d = diag_diffs.shape
        acc = np.empty(d, dtype=np.float64)
        best = 0.0
        for idx in range(masks.shape[0]):
            m = masks[idx]
            acc[:] = 0.0
            for i in range(n):
                if (m >> i) & 1:
                    acc += diag_diffs[i]
            for j in range(d):
                v = abs(acc[j])
                if v > best:
                    best = v
        return best


def max_subset_norm(diffs: np.ndarray, masks: np.ndarray) -> float:
    """Max over ``masks`` of the operator norm of the masked sum of ``diffs``.

    Parameters
    ----------
    diffs : (n, d, d) complex array
        Hermitian difference operators M_i - N_i.
    masks : (m,) int64 array
        Subset bitmasks; bit i selects ``diffs[i]``.
    """
    diffs = np.ascontiguousarray(diffs, dtype=np.complex128)
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    if HAS_NUMBA:
        return float(_max_subset_norm_numba(diffs, masks))
    return _max_subset_norm_numpy(diffs, masks)


def max_subset_norm_diag(diag_diffs: np.ndarray, masks: np.ndarray) -> float:
    """Diagonal-effects fast path of :func:`max_subset_norm`.

    ``diag_diffs`` holds the real diagonals, shape (n, d); the operator norm
    of a diagonal matrix is the max absolute diagonal entry.
    """
    diag_diffs = np.ascontiguousarray(diag_diffs, dtype=np.float64)
    masks = np.ascontiguousarray(masks, dtype=np.int64)
    if HAS_NUMBA:
        return float(_max_subset_norm_diag_numba(diag_diffs, masks))
    return _max_subset_norm_diag_numpy(diag_diffs, masks)


# ---------------------------------------------------------------------------
# batched Euclidean projection onto the probability simplex
# ---------------------------------------------------------------------------

def _simplex_rows_numpy(rows: np.ndarray) -> np.ndarray:
    m, n = rows.shape
    u = np.sort(rows, axis=1)[:, ::-1]
    cumulative = np.cumsum(u, axis=1)
    k = np.arange(1, n + 1, dtype=np.float64)
    positive = u - (cumulative - 1.0) / k > 0.0
    rho = n - 1 - np.argmax(positive[:, ::-1], axis=1)
    tau = (cumulative[np.arange(m), rho] - 1.0) / (rho + 1.0)
    return np.maximum(rows - tau[:, None], 0.0)


if HAS_NUMBA:

    @njit(cache=True)
    def _simplex_rows_numba(rows):
        m, n = rows.shape
        out = np.empty_like(rows)
        for t in range(m):
            u = np.sort(rows[t])[::-1]
            cumulative = 0.0
            tau = 0.0
            for k in range(n):
                cumulative += u[k]
                candidate = (cumulative - 1.0) / (k + 1.0)
                if u[k] - candidate > 0.0:
                    tau = candidate
            for j in range(n):
                v = rows[t, j] - tau
                out[t, j] = v if v > 0.0 else 0.0
        return out


def simplex_project_rows(rows: np.ndarray) -> np.ndarray:
    """Project each row onto the probability simplex (sort-and-threshold).

    Exact Euclidean projection: sort descending, find the largest k with
    u_k - (sum_{j<=k} u_j - 1)/k > 0, subtract that threshold, clamp at 0.
    """
    rows = np.ascontiguousarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise ValueError(f"expected a (m, n) array of rows, got shape {rows.shape}")
    if HAS_NUMBA:
        return _simplex_rows_numba(rows)
    return _simplex_rows_numpy(rows)


# ---------------------------------------------------------------------------
# MLE fixed-point iteration for detector tomography
# ---------------------------------------------------------------------------

def _mle_loop_numpy(probes, freqs, effects, tol, max_iter):
    n = effects.shape[0]
    positive = freqs > 0.0
    ll_trace = np.empty(max_iter, dtype=np.float64)
    iterations = 0
    change = np.inf
    for it in range(max_iter):
        p = np.einsum("lab,iba->li", probes, effects).real
        np.clip(p, MLE_PROBABILITY_FLOOR, None, out=p)
        ll_trace[it] = float(np.sum(freqs[positive] * np.log(p[positive])))
        coef = np.where(positive, freqs / p, 0.0)
        r = np.einsum("li,lab->iab", coef, probes)
        rmr = r @ effects @ r
        total = rmr.sum(axis=0)
        w, v = np.linalg.eigh(total)
        np.clip(w, MLE_EIGENVALUE_FLOOR, None, out=w)
        lam = (v / np.sqrt(w)) @ v.conj().T
        updated = lam @ rmr @ lam
        updated = (updated + np.conj(np.swapaxes(updated, 1, 2))) / 2.0
        change = float(
            np.sqrt((np.abs(updated - effects) ** 2).sum(axis=(1, 2))).max()
        )
        effects = updated
        iterations = it + 1
        if change <= tol:
            break
    return effects, iterations, change, ll_trace[:iterations].copy()


if HAS_NUMBA:

    @njit(cache=True)
    def _mle_loop_numba(probes, freqs, effects, tol, max_iter):
        L, d, _ = probes.shape
        n = effects.shape[0]
        ll_trace = np.empty(max_iter, dtype=np.float64)
        r = np.empty((n, d, d), dtype=np.complex128)
        rmr = np.empty((n, d, d), dtype=np.complex128)
        iterations = 0
        change = np.inf
        for it in range(max_iter):
            ll = 0.0
            r[:] = 0.0
            for i in range(n):
                for l in range(L):
                    p = 0.0
                    for a in range(d):
                        for b in range(d):
                            p += (probes[l, a, b] * effects[i, b, a]).real
                    if p < MLE_PROBABILITY_FLOOR:
                        p = MLE_PROBABILITY_FLOOR
                    f = freqs[l, i]
                    if f > 0.0:
                        ll += f * np.log(p)
                        r[i] += (f / p) * probes[l]
            ll_trace[it] = ll
            total = np.zeros((d, d), dtype=np.complex128)
            for i in range(n):
                rmr[i] = r[i] @ effects[i] @ r[i]
                total += rmr[i]
            w, v = np.linalg.eigh(total)
            for j in range(d):
                if w[j] < MLE_EIGENVALUE_FLOOR:
                    w[j] = MLE_EIGENVALUE_FLOOR
            lam = (v / np.sqrt(w)) @ v.conj().T
            change = 0.0
            for i in range(n):
                updated = lam @ rmr[i] @ lam
                updated = (updated + updated.conj().T) / 2.0
                step = 0.0
                for a in range(d):
                    for b in range(d):
                        delta = updated[a, b] - effects[i, a, b]
                        step += delta.real * delta.real + delta.imag * delta.imag
                step = np.sqrt(step)
                if step > change:
                    change = step
                effects[i] = updated
            iterations = it + 1
            if change <= tol:
                break
        return effects, iterations, change, ll_trace[:iterations].copy()


def mle_fixed_point(probes: np.ndarray, freqs: np.ndarray, initial: np.ndarray,
                    tol: float, max_iter: int):
    """Run the positivity-preserving likelihood iteration until the step norm
    drops to ``tol`` or ``max_iter`` is hit.

    Returns ``(effects, iterations, final_change, log_likelihood_trace)``;
    the trace holds one likelihood value per iteration, evaluated before the
    corresponding update.
    """
    probes = np.ascontiguousarray(probes, dtype=np.complex128)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    initial = np.ascontiguousarray(initial, dtype=np.complex128).copy()
    if HAS_NUMBA:
        return _mle_loop_numba(probes, freqs, initial, float(tol), int(max_iter))
    return _mle_loop_numpy(probes, freqs, initial, float(tol), int(max_iter))
