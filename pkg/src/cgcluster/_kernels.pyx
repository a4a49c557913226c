# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: batched 1-D DWT analysis pass and Lloyd iteration.

Mirrors _kernels_py exactly; the DWT pass sums taps in the same order so both
backends produce bit-identical coefficients (the extension is compiled with
-ffp-contract=off to keep that true).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def batch_dwt_pass(object x_in, object lowpass, object highpass):
    """One analysis level applied to each row of ``x_in``.

    Half-point symmetric extension, correlation with the decomposition
    filters, downsample by two; output length (n + taps - 1) // 2.
    """
    cdef double[:, ::1] x = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef double[::1] lo = np.ascontiguousarray(lowpass, dtype=np.float64)
    cdef double[::1] hi = np.ascontiguousarray(highpass, dtype=np.float64)
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    cdef Py_ssize_t taps = lo.shape[0]
    if n < taps:
        raise ValueError(f"signal length {n} shorter than filter length {taps}")
    cdef Py_ssize_t e = taps - 1
    cdef Py_ssize_t n_out = (n + taps - 1) // 2
    approx = np.zeros((m, n_out))
    detail = np.zeros((m, n_out))
    cdef double[:, ::1] av = approx
    cdef double[:, ::1] dv = detail
    cdef Py_ssize_t r, k, t, j
    cdef double sa, sd, v
    with nogil:
        for r in range(m):
            for k in range(n_out):
                sa = 0.0
                sd = 0.0
                for t in range(taps):
                    j = 2 * k + 1 + t - e
                    if j < 0:
                        j = -1 - j
                    elif j >= n:
                        j = 2 * n - 1 - j
                    v = x[r, j]
                    sa = sa + lo[t] * v
                    sd = sd + hi[t] * v
                av[r, k] = sa
                dv[r, k] = sd
    return approx, detail


def lloyd_iter(object x_in, object centroids):
    """One Lloyd step; see the python backend for the contract."""
    cdef double[:, ::1] x = np.ascontiguousarray(x_in, dtype=np.float64)
    cdef double[:, ::1] c = np.ascontiguousarray(centroids, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t k = c.shape[0]
    labels = np.empty(n, dtype=np.int64)
    sums = np.zeros((k, d))
    counts = np.zeros(k, dtype=np.int64)
    cdef long long[::1] lv = labels
    cdef double[:, ::1] sv = sums
    cdef long long[::1] cv = counts
    cdef Py_ssize_t i, j, t, best
    cdef double dist, bestdist, diff, sse = 0.0
    with nogil:
        for i in range(n):
            best = 0
            bestdist = 0.0
            for t in range(d):
                diff = x[i, t] - c[0, t]
                bestdist = bestdist + diff * diff
            for j in range(1, k):
                dist = 0.0
                for t in range(d):
                    diff = x[i, t] - c[j, t]
                    dist = dist + diff * diff
                if dist < bestdist:
                    bestdist = dist
                    best = j
            lv[i] = best
            cv[best] += 1
            for t in range(d):
                sv[best, t] += x[i, t]
            sse = sse + bestdist
    return labels, sums, counts, sse
