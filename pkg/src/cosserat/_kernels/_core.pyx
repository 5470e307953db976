# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled per-node kernels; mirrors ``_numpy`` exactly.

Plain C loops over the node batch with unrolled 3x3 arithmetic: no
temporaries, one pass per kernel.  Semantics and argument order match
the numpy fallback one-to-one.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, pow, sin, sqrt

cnp.import_array()


cdef inline void _mat_tn(const double* r, const double* f, double* out) noexcept nogil:
    # out = r^T f for row-major 3x3 blocks
    cdef int i, j, m
    for i in range(3):
        for j in range(3):
            out[3 * i + j] = (
                r[i] * f[j] + r[3 + i] * f[3 + j] + r[6 + i] * f[6 + j]
            )


def stretch_batch(cnp.ndarray[double, ndim=3] r, cnp.ndarray[double, ndim=3] f):
    """U = R^T F per node."""
    cdef Py_ssize_t n = r.shape[0], node
    cdef cnp.ndarray[double, ndim=3] out = np.empty((n, 3, 3))
    cdef double[:, :, ::1] rv = np.ascontiguousarray(r)
    cdef double[:, :, ::1] fv = np.ascontiguousarray(f)
    cdef double[:, :, ::1] ov = out
    with nogil:
        for node in range(n):
            _mat_tn(&rv[node, 0, 0], &fv[node, 0, 0], &ov[node, 0, 0])
    return out


def strain_batch(cnp.ndarray[double, ndim=3] r, cnp.ndarray[double, ndim=3] f):
    """E = R^T F - id per node."""
    cdef cnp.ndarray[double, ndim=3] out = stretch_batch(r, f)
    cdef Py_ssize_t n = out.shape[0], node
    cdef double[:, :, ::1] ov = out
    with nogil:
        for node in range(n):
            ov[node, 0, 0] -= 1.0
            ov[node, 1, 1] -= 1.0
            ov[node, 2, 2] -= 1.0
    return out


def slices_batch(cnp.ndarray[double, ndim=3] r, cnp.ndarray[double, ndim=4] dr,
                 bint project=True):
    """Slices S_k = R^T dR_k with optional skew projection; dr is (n,3,3,k)."""
    cdef Py_ssize_t n = r.shape[0], node
    cdef int i, j, k, m
    cdef double acc, other
    cdef cnp.ndarray[double, ndim=4] out = np.empty((n, 3, 3, 3))
    cdef double[:, :, ::1] rv = np.ascontiguousarray(r)
    cdef double[:, :, :, ::1] dv = np.ascontiguousarray(dr)
    cdef double[:, :, :, ::1] ov = out
    with nogil:
        for node in range(n):
            for k in range(3):
                for i in range(3):
                    for j in range(3):
                        acc = 0.0
                        for m in range(3):
                            acc += rv[node, m, i] * dv[node, m, j, k]
                        ov[node, i, j, k] = acc
            if project:
                for k in range(3):
                    for i in range(3):
                        ov[node, i, i, k] = 0.0
                        for j in range(i + 1, 3):
                            acc = 0.5 * (ov[node, i, j, k] - ov[node, j, i, k])
                            ov[node, i, j, k] = acc
                            ov[node, j, i, k] = -acc
    return out


def dislocation_from_slices(cnp.ndarray[double, ndim=4] s):
    """K = -sum_k S_k anti(e_k)."""
    cdef Py_ssize_t n = s.shape[0], node
    cdef cnp.ndarray[double, ndim=3] out = np.zeros((n, 3, 3))
    cdef double[:, :, :, ::1] sv = np.ascontiguousarray(s)
    cdef double[:, :, ::1] ov = out
    cdef int i
    with nogil:
        for node in range(n):
            for i in range(3):
                # anti(e_0): columns (.,2,1) signs; expanded explicitly
                ov[node, i, 1] += -sv[node, i, 2, 0]
                ov[node, i, 2] += sv[node, i, 1, 0]
                ov[node, i, 0] += sv[node, i, 2, 1]
                ov[node, i, 2] += -sv[node, i, 0, 1]
                ov[node, i, 0] += -sv[node, i, 1, 2]
                ov[node, i, 1] += sv[node, i, 0, 2]
    return out


def measures_batch(cnp.ndarray[double, ndim=3] r, cnp.ndarray[double, ndim=3] f,
                   cnp.ndarray[double, ndim=4] dr):
    """Fused strain + dislocation measures (E, K) for the energy path."""
    cdef Py_ssize_t n = r.shape[0], node
    cdef cnp.ndarray[double, ndim=3] e = np.empty((n, 3, 3))
    cdef cnp.ndarray[double, ndim=3] kk = np.zeros((n, 3, 3))
    cdef double[:, :, ::1] rv = np.ascontiguousarray(r)
    cdef double[:, :, ::1] fv = np.ascontiguousarray(f)
    cdef double[:, :, :, ::1] dv = np.ascontiguousarray(dr)
    cdef double[:, :, ::1] ev = e
    cdef double[:, :, ::1] kv = kk
    cdef double s[9]
    cdef double s01, s02, s12
    cdef int i, k, m
    with nogil:
        for node in range(n):
            _mat_tn(&rv[node, 0, 0], &fv[node, 0, 0], &ev[node, 0, 0])
            ev[node, 0, 0] -= 1.0
            ev[node, 1, 1] -= 1.0
            ev[node, 2, 2] -= 1.0
            for k in range(3):
                # skew-projected slice S_k of R^T dR_k
                s01 = 0.0
                s02 = 0.0
                s12 = 0.0
                for m in range(3):
                    s01 += rv[node, m, 0] * dv[node, m, 1, k] - rv[node, m, 1] * dv[node, m, 0, k]
                    s02 += rv[node, m, 0] * dv[node, m, 2, k] - rv[node, m, 2] * dv[node, m, 0, k]
                    s12 += rv[node, m, 1] * dv[node, m, 2, k] - rv[node, m, 2] * dv[node, m, 1, k]
                s[0] = 0.0
                s[1] = 0.5 * s01
                s[2] = 0.5 * s02
                s[3] = -0.5 * s01
                s[4] = 0.0
                s[5] = 0.5 * s12
                s[6] = -0.5 * s02
                s[7] = -0.5 * s12
                s[8] = 0.0
                # K -= S_k anti(e_k)
                if k == 0:
                    for i in range(3):
                        kv[node, i, 1] -= s[3 * i + 2]
                        kv[node, i, 2] += s[3 * i + 1]
                elif k == 1:
                    for i in range(3):
                        kv[node, i, 0] += s[3 * i + 2]
                        kv[node, i, 2] -= s[3 * i]
                else:
                    for i in range(3):
                        kv[node, i, 0] -= s[3 * i + 1]
                        kv[node, i, 1] += s[3 * i]
    return e, kk


cdef inline void _split(const double* m, double* ds, double* sk, double* tr) noexcept nogil:
    # orthogonal split into deviatoric-symmetric part, skew part and trace
    cdef double t = m[0] + m[4] + m[8]
    cdef int i, j
    for i in range(3):
        for j in range(3):
            ds[3 * i + j] = 0.5 * (m[3 * i + j] + m[3 * j + i])
            sk[3 * i + j] = 0.5 * (m[3 * i + j] - m[3 * j + i])
    ds[0] -= t / 3.0
    ds[4] -= t / 3.0
    ds[8] -= t / 3.0
    tr[0] = t


cdef inline double _nsq9(const double* a) noexcept nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(9):
        acc += a[i] * a[i]
    return acc


cdef inline double _dot9(const double* a, const double* b) noexcept nogil:
    cdef double acc = 0.0
    cdef int i
    for i in range(9):
        acc += a[i] * b[i]
    return acc


def energy_density(cnp.ndarray[double, ndim=3] e, cnp.ndarray[double, ndim=3] k,
                   double mu, double mu_c, double kappa,
                   double a1, double a2, double a3,
                   double lc, double p,
                   double s1, double s2, double s3):
    """Total density per node; s1..s3 are the chiral coefficients."""
    cdef Py_ssize_t n = e.shape[0], node
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef double[:, :, ::1] ev = np.ascontiguousarray(e)
    cdef double[:, :, ::1] kv = np.ascontiguousarray(k)
    cdef double[::1] ov = out
    cdef double dse[9]
    cdef double ske[9]
    cdef double dsk[9]
    cdef double skk[9]
    cdef double tre, trk, w, b
    cdef double lcp = pow(lc, p)
    cdef bint chiral = s1 != 0.0 or s2 != 0.0 or s3 != 0.0
    cdef bint quad = p == 2.0
    with nogil:
        for node in range(n):
            _split(&ev[node, 0, 0], dse, ske, &tre)
            _split(&kv[node, 0, 0], dsk, skk, &trk)
            w = mu * _nsq9(dse) + mu_c * _nsq9(ske) + 0.5 * kappa * tre * tre
            b = a1 * _nsq9(dsk) + a2 * _nsq9(skk) + a3 * trk * trk
            if quad:
                w += mu * lcp * b
            else:
                w += mu * lcp * pow(b, 0.5 * p)
            if chiral:
                w += s1 * _dot9(dse, dsk) + s2 * _dot9(ske, skk) + s3 * tre * trk
            ov[node] = w
    return out


def energy_derivs(cnp.ndarray[double, ndim=3] e, cnp.ndarray[double, ndim=3] k,
                  double mu, double mu_c, double kappa,
                  double a1, double a2, double a3,
                  double lc, double p,
                  double s1, double s2, double s3):
    """(dW/dE, dW/dK) per node."""
    cdef Py_ssize_t n = e.shape[0], node
    cdef cnp.ndarray[double, ndim=3] de = np.empty((n, 3, 3))
    cdef cnp.ndarray[double, ndim=3] dk = np.empty((n, 3, 3))
    cdef double[:, :, ::1] ev = np.ascontiguousarray(e)
    cdef double[:, :, ::1] kv = np.ascontiguousarray(k)
    cdef double[:, :, ::1] dev = de
    cdef double[:, :, ::1] dkv = dk
    cdef double dse[9]
    cdef double ske[9]
    cdef double dsk[9]
    cdef double skk[9]
    cdef double tre, trk, b, factor
    cdef double lcp = pow(lc, p)
    cdef int i, j
    cdef bint chiral = s1 != 0.0 or s2 != 0.0 or s3 != 0.0
    cdef bint quad = p == 2.0
    with nogil:
        for node in range(n):
            _split(&ev[node, 0, 0], dse, ske, &tre)
            _split(&kv[node, 0, 0], dsk, skk, &trk)
            if quad:
                factor = mu * lcp
            else:
                b = a1 * _nsq9(dsk) + a2 * _nsq9(skk) + a3 * trk * trk
                if b > 0.0:
                    factor = mu * lcp * 0.5 * p * pow(b, 0.5 * p - 1.0)
                else:
                    factor = 0.0
            for i in range(3):
                for j in range(3):
                    dev[node, i, j] = 2.0 * mu * dse[3 * i + j] + 2.0 * mu_c * ske[3 * i + j]
                    dkv[node, i, j] = factor * 2.0 * (
                        a1 * dsk[3 * i + j] + a2 * skk[3 * i + j]
                    )
                dev[node, i, i] += kappa * tre
                dkv[node, i, i] += factor * 2.0 * a3 * trk
            if chiral:
                for i in range(3):
                    for j in range(3):
                        dev[node, i, j] += s1 * dsk[3 * i + j] + s2 * skk[3 * i + j]
                        dkv[node, i, j] += s1 * dse[3 * i + j] + s2 * ske[3 * i + j]
                    dev[node, i, i] += s3 * trk
                    dkv[node, i, i] += s3 * tre
    return de, dk


cdef inline void _exp_into(const double* w, double* out) noexcept nogil:
    cdef double tsq = w[0] * w[0] + w[1] * w[1] + w[2] * w[2]
    cdef double a, b, t
    if tsq < 1e-8:
        a = 1.0 - tsq / 6.0 + tsq * tsq / 120.0
        b = 0.5 - tsq / 24.0 + tsq * tsq / 720.0
    else:
        t = sqrt(tsq)
        a = sin(t) / t
        b = (1.0 - cos(t)) / tsq
    out[0] = 1.0 + b * (-w[2] * w[2] - w[1] * w[1])
    out[1] = -a * w[2] + b * w[0] * w[1]
    out[2] = a * w[1] + b * w[0] * w[2]
    out[3] = a * w[2] + b * w[0] * w[1]
    out[4] = 1.0 + b * (-w[2] * w[2] - w[0] * w[0])
    out[5] = -a * w[0] + b * w[1] * w[2]
    out[6] = -a * w[1] + b * w[0] * w[2]
    out[7] = a * w[0] + b * w[1] * w[2]
    out[8] = 1.0 + b * (-w[1] * w[1] - w[0] * w[0])


def exp_so3_batch(cnp.ndarray[double, ndim=2] w):
    """Rodrigues formula per node."""
    cdef Py_ssize_t n = w.shape[0], node
    cdef cnp.ndarray[double, ndim=3] out = np.empty((n, 3, 3))
    cdef double[:, ::1] wv = np.ascontiguousarray(w)
    cdef double[:, :, ::1] ov = out
    with nogil:
        for node in range(n):
            _exp_into(&wv[node, 0], &ov[node, 0, 0])
    return out


def rotate_step_batch(cnp.ndarray[double, ndim=3] r, cnp.ndarray[double, ndim=2] w):
    """R <- R exp(anti(w)) per node."""
    cdef Py_ssize_t n = r.shape[0], node
    cdef cnp.ndarray[double, ndim=3] out = np.empty((n, 3, 3))
    cdef double[:, :, ::1] rv = np.ascontiguousarray(r)
    cdef double[:, ::1] wv = np.ascontiguousarray(w)
    cdef double[:, :, ::1] ov = out
    cdef double q[9]
    cdef int i, j, m
    cdef double acc
    with nogil:
        for node in range(n):
            _exp_into(&wv[node, 0], q)
            for i in range(3):
                for j in range(3):
                    acc = 0.0
                    for m in range(3):
                        acc += rv[node, i, m] * q[3 * m + j]
                    ov[node, i, j] = acc
    return out


def axl_skew_mat_batch(cnp.ndarray[double, ndim=3] a):
    """axl(skew(A)) per node."""
    cdef Py_ssize_t n = a.shape[0], node
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, 3))
    cdef double[:, :, ::1] av = np.ascontiguousarray(a)
    cdef double[:, ::1] ov = out
    with nogil:
        for node in range(n):
            ov[node, 0] = 0.5 * (av[node, 2, 1] - av[node, 1, 2])
            ov[node, 1] = 0.5 * (av[node, 0, 2] - av[node, 2, 0])
            ov[node, 2] = 0.5 * (av[node, 1, 0] - av[node, 0, 1])
    return out
