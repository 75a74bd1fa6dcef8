# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair sums for the translation-corrected K estimators."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor

cnp.import_array()


cdef inline Py_ssize_t _lower_bound(const double* a, Py_ssize_t n, double v) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


def pair_sums(double[::1] ax, double[::1] ay, double[::1] aw,
              double[::1] bx, double[::1] by, double[::1] bw,
              double[::1] ux, double[::1] uy,
              double x0, double y0, double width, double height,
              bint same):
    """Per-bin sums of ``aw[i] bw[j] / overlap(dx, dy)`` over anchored pairs.

    See ``mondrian_stit._kernels_py.pair_sums`` for the exact contract.
    """
    cdef Py_ssize_t na = ax.shape[0], nb = bx.shape[0], nbin = ux.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hist_arr = np.zeros(nbin, dtype=np.float64)
    if na == 0 or nb == 0 or nbin == 0:
        return hist_arr
    cdef double[::1] hist = hist_arr
    cdef double umax = ux[nbin - 1], vmax = uy[nbin - 1]
    cdef double cx = umax * (1.0 + 1e-9) + 1e-300
    cdef double cy = vmax * (1.0 + 1e-9) + 1e-300
    cdef Py_ssize_t ncx = <Py_ssize_t>floor(width / cx) + 1
    cdef Py_ssize_t ncy = <Py_ssize_t>floor(height / cy) + 1
    cdef cnp.ndarray[cnp.intp_t, ndim=1] bcell_arr = np.empty(nb, dtype=np.intp)
    cdef cnp.intp_t[::1] bcell = bcell_arr
    cdef Py_ssize_t j, i, k, k2, cxi, cyi, ox, oy, c, s, e, kk
    for j in range(nb):
        cxi = <Py_ssize_t>floor((bx[j] - x0) / cx)
        cyi = <Py_ssize_t>floor((by[j] - y0) / cy)
        cxi = min(max(cxi, 0), ncx - 1)
        cyi = min(max(cyi, 0), ncy - 1)
        bcell[j] = cxi * ncy + cyi
    cdef cnp.ndarray[cnp.intp_t, ndim=1] order_arr = np.argsort(bcell_arr, kind="stable")
    cdef cnp.intp_t[::1] order = order_arr
    cdef cnp.ndarray[cnp.intp_t, ndim=1] start_arr = np.searchsorted(
        bcell_arr[order_arr], np.arange(ncx * ncy + 1), side="left").astype(np.intp)
    cdef cnp.intp_t[::1] start = start_arr
    cdef double dx, dy
    cdef const double* pux = &ux[0]
    cdef const double* puy = &uy[0]
    with nogil:
        for i in range(na):
            cxi = <Py_ssize_t>floor((ax[i] - x0) / cx)
            cyi = <Py_ssize_t>floor((ay[i] - y0) / cy)
            cxi = min(max(cxi, 0), ncx - 1)
            cyi = min(max(cyi, 0), ncy - 1)
            for ox in range(2):
                if cxi + ox >= ncx:
                    break
                for oy in range(2):
                    if cyi + oy >= ncy:
                        break
                    c = (cxi + ox) * ncy + cyi + oy
                    s = start[c]
                    e = start[c + 1]
                    for kk in range(s, e):
                        j = order[kk]
                        if same and j == i:
                            continue
                        dx = bx[j] - ax[i]
                        dy = by[j] - ay[i]
                        if dx < 0.0 or dy < 0.0 or dx > umax or dy > vmax:
                            continue
                        k = _lower_bound(pux, nbin, dx)
                        k2 = _lower_bound(puy, nbin, dy)
                        if k2 > k:
                            k = k2
                        hist[k] += aw[i] * bw[j] / ((width - dx) * (height - dy))
    return hist_arr
