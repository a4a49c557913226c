"""Numpy implementations of the hot kernels.

These are the import-time fallback for the compiled extension module and the
reference its outputs are checked against. ``batch_dwt_pass`` accumulates the
filter taps in the same order as the compiled loop so the two backends agree
bitwise; Lloyd distances use BLAS here and therefore agree with the compiled
backend only to rounding.
"""

import numpy as np

BACKEND_NAME = "python"


def batch_dwt_pass(x, lowpass, highpass):
    """One analysis level applied to each row of ``x``.

    Rows are extended symmetrically (half-point: the edge sample repeats),
    correlated with the decomposition filters, and downsampled by two. Output
    length is (n + taps - 1) // 2 per row.
    """
    x = np.asarray(x, dtype=np.float64)
    lo = np.asarray(lowpass, dtype=np.float64)
    hi = np.asarray(highpass, dtype=np.float64)
    m, n = x.shape
    taps = lo.shape[0]
    if n < taps:
        raise ValueError(f"signal length {n} shorter than filter length {taps}")
    e = taps - 1
    ext = np.concatenate([x[:, e - 1 :: -1], x, x[:, : -e - 1 : -1]], axis=1)
    n_out = (n + taps - 1) // 2
    idx = 1 + 2 * np.arange(n_out)
    approx = np.zeros((m, n_out))
    detail = np.zeros((m, n_out))
    for t in range(taps):
        seg = ext[:, idx + t]
        approx += lo[t] * seg
        detail += hi[t] * seg
    return approx, detail


def lloyd_iter(x, centroids):
    """One Lloyd step: assign points to nearest centroid and accumulate.

    Returns (labels, sums, counts, sse) where sums/counts give the next
    centroids and sse is the objective of the assignment against the given
    centroids. Distance ties resolve to the lowest centroid index.
    """
    x = np.asarray(x, dtype=np.float64)
    c = np.asarray(centroids, dtype=np.float64)
    k = c.shape[0]
    d2 = (
        np.einsum("nd,nd->n", x, x)[:, None]
        - 2.0 * (x @ c.T)
        + np.einsum("kd,kd->k", c, c)[None, :]
    )
    labels = np.argmin(d2, axis=1)
    counts = np.bincount(labels, minlength=k)
    sums = np.zeros_like(c)
    np.add.at(sums, labels, x)
    diff = x - c[labels]
    sse = float(np.einsum("nd,nd->", diff, diff))
    return labels.astype(np.int64), sums, counts.astype(np.int64), sse
