# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels. Must stay numerically in step with ``_fallback.py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log2

cnp.import_array()

ctypedef cnp.int64_t i64


def _relabel(i64[:] keys, Py_ssize_t n_keys):
    # keys in [0, n_keys) -> dense ids in first-occurrence order
    cdef Py_ssize_t n = keys.shape[0]
    cdef cnp.ndarray[i64, ndim=1] seen = np.full(n_keys, -1, dtype=np.int64)
    cdef i64[:] seen_v = seen
    cdef cnp.ndarray[i64, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef i64[:] out_v = out
    cdef Py_ssize_t i
    cdef i64 k = 0, key
    with nogil:
        for i in range(n):
            key = keys[i]
            if seen_v[key] < 0:
                seen_v[key] = k
                k += 1
            out_v[i] = seen_v[key]
    return out, k


def cmi_sum(const i64[:] x, const i64[:] y, const i64[:, :] z):
    """Joint-weighted conditional mutual information I(x; y | z) in bits, unclamped."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t n_cond = z.shape[1]
    cdef Py_ssize_t i, c
    cdef i64 kx = 0, ky = 0, kz = 1, kxz, kyz, kxyz, width
    cdef cnp.ndarray[i64, ndim=1] keys = np.empty(n, dtype=np.int64)
    cdef i64[:] keys_v = keys
    cdef i64[:] z_id
    cdef i64[:] xz_id
    cdef i64[:] yz_id
    cdef i64[:] xyz_id

    if n == 0:
        return 0.0
    with nogil:
        for i in range(n):
            if x[i] >= kx:
                kx = x[i] + 1
            if y[i] >= ky:
                ky = y[i] + 1

    z_arr = np.zeros(n, dtype=np.int64)
    z_id = z_arr
    for c in range(n_cond):
        width = 0
        with nogil:
            for i in range(n):
                if z[i, c] >= width:
                    width = z[i, c] + 1
            for i in range(n):
                keys_v[i] = z_id[i] * width + z[i, c]
        z_arr, kz = _relabel(keys, kz * width)
        z_id = z_arr

    with nogil:
        for i in range(n):
            keys_v[i] = z_id[i] * kx + x[i]
    xz_arr, kxz = _relabel(keys, kz * kx)
    xz_id = xz_arr
    with nogil:
        for i in range(n):
            keys_v[i] = z_id[i] * ky + y[i]
    yz_arr, kyz = _relabel(keys, kz * ky)
    yz_id = yz_arr
    with nogil:
        for i in range(n):
            keys_v[i] = xz_id[i] * ky + y[i]
    xyz_arr, kxyz = _relabel(keys, kxz * ky)
    xyz_id = xyz_arr

    cdef cnp.ndarray[i64, ndim=1] nz = np.zeros(kz, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] nxz = np.zeros(kxz, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] nyz = np.zeros(kyz, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] nxyz = np.zeros(kxyz, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] rep = np.full(kxyz, -1, dtype=np.int64)
    cdef i64[:] nz_v = nz
    cdef i64[:] nxz_v = nxz
    cdef i64[:] nyz_v = nyz
    cdef i64[:] nxyz_v = nxyz
    cdef i64[:] rep_v = rep
    cdef double total = 0.0, cnt
    cdef i64 r
    with nogil:
        for i in range(n):
            nz_v[z_id[i]] += 1
            nxz_v[xz_id[i]] += 1
            nyz_v[yz_id[i]] += 1
            nxyz_v[xyz_id[i]] += 1
            if rep_v[xyz_id[i]] < 0:
                rep_v[xyz_id[i]] = i
        for c in range(kxyz):
            r = rep_v[c]
            cnt = <double>nxyz_v[c]
            total += cnt * log2((cnt * <double>nz_v[z_id[r]])
                                / (<double>nxz_v[xz_id[r]] * <double>nyz_v[yz_id[r]]))
    return total / <double>n


def route(const i64[:] feature, const double[:] threshold, const i64[:] left,
          const i64[:] right, const double[:, :] X):
    """Index of the leaf reached by every row of ``X`` in a flattened tree."""
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t i
    cdef i64 node
    cdef cnp.ndarray[i64, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef i64[:] out_v = out
    with nogil:
        for i in range(n):
            node = 0
            while feature[node] >= 0:
                if X[i, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            out_v[i] = node
    return out
