# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels: row sums of squares, Lloyd iterations, cyclic
Jacobi eigendecomposition. Semantics mirror ``_pykernels`` exactly (same
tie-breaking, same empty-cluster repair, same sweep order)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

BACKEND_NAME = "compiled"


def sum_squares_rows(x):
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], s = xv.shape[1]
    out = np.zeros(n)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(s):
            acc += xv[i, j] * xv[i, j]
        ov[i] = acc
    return out


def lloyd(x, init_idx, max_iter):
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], d = xv.shape[1]
    cdef const long long[::1] init = np.ascontiguousarray(init_idx, dtype=np.int64)
    cdef Py_ssize_t k = init.shape[0]
    cdef Py_ssize_t m_max = max_iter

    centroids = np.empty((k, d))
    cdef double[:, ::1] cv = centroids
    labels = np.zeros(n, dtype=np.int64)
    cdef long long[::1] lv = labels
    prev = np.empty(n, dtype=np.int64)
    cdef long long[::1] pv = prev
    assigned = np.empty(n)
    cdef double[::1] av = assigned
    counts = np.empty(k, dtype=np.int64)
    cdef long long[::1] cnt = counts
    taken = np.empty(n, dtype=np.int64)
    cdef long long[::1] tkn = taken
    history = np.empty(m_max)
    cdef double[::1] hv = history

    cdef Py_ssize_t i, j, r, it, best, n_hist = 0
    cdef double acc, dist, bestd, diff
    cdef bint converged = False, have_prev = False, same
    cdef Py_ssize_t iterations = 0

    for r in range(k):
        for j in range(d):
            cv[r, j] = xv[init[r], j]

    for it in range(m_max):
        iterations += 1
        # assignment step: nearest centroid, ties to the lowest index
        for i in range(n):
            bestd = -1.0
            best = 0
            for r in range(k):
                acc = 0.0
                for j in range(d):
                    diff = xv[i, j] - cv[r, j]
                    acc += diff * diff
                if bestd < 0.0 or acc < bestd:
                    bestd = acc
                    best = r
            lv[i] = best
            av[i] = bestd
        if have_prev:
            same = True
            for i in range(n):
                if lv[i] != pv[i]:
                    same = False
                    break
            if same:
                converged = True
                break
        for i in range(n):
            pv[i] = lv[i]
        have_prev = True
        # update step: means; empty centroids take the farthest unused rows
        for r in range(k):
            cnt[r] = 0
            for j in range(d):
                cv[r, j] = 0.0
        for i in range(n):
            r = lv[i]
            cnt[r] += 1
            for j in range(d):
                cv[r, j] += xv[i, j]
        for i in range(n):
            tkn[i] = 0
        for r in range(k):
            if cnt[r] > 0:
                for j in range(d):
                    cv[r, j] /= cnt[r]
            else:
                best = -1
                bestd = -1.0
                for i in range(n):
                    if tkn[i] == 0 and av[i] > bestd:
                        bestd = av[i]
                        best = i
                for j in range(d):
                    cv[r, j] = xv[best, j]
                tkn[best] = 1
        acc = 0.0
        for i in range(n):
            r = lv[i]
            dist = 0.0
            for j in range(d):
                diff = xv[i, j] - cv[r, j]
                dist += diff * diff
            acc += dist
        hv[n_hist] = acc
        n_hist += 1

    return (
        labels,
        centroids,
        float(hv[n_hist - 1]),
        bool(converged),
        int(iterations),
        np.asarray(history[:n_hist]).copy(),
    )


cdef double _off_norm(double[:, ::1] a, Py_ssize_t n) noexcept:
    cdef double off2 = 0.0
    cdef Py_ssize_t i, j
    for i in range(n):
        for j in range(n):
            if i != j:
                off2 += a[i, j] * a[i, j]
    if off2 < 0.0:
        off2 = 0.0
    return sqrt(off2)


def jacobi_eigh(a_in, tol_factor=1e-10, max_sweeps=100):
    a = np.array(a_in, dtype=np.float64, copy=True, order="C")
    cdef double[:, ::1] a_v = a
    cdef Py_ssize_t n = a_v.shape[0]
    v = np.eye(n)
    cdef double[:, ::1] vv = v
    cdef Py_ssize_t sweeps_max = max_sweeps

    cdef double fro = 0.0
    cdef Py_ssize_t i, j, p, q, sweeps = 0
    for i in range(n):
        for j in range(n):
            fro += a_v[i, j] * a_v[i, j]
    cdef double thresh = tol_factor * sqrt(fro)

    history = np.empty(sweeps_max)
    cdef double[::1] hv = history
    cdef Py_ssize_t n_hist = 0
    cdef double apq, app, aqq, tau, t, c, s, akp, akq

    while _off_norm(a_v, n) > thresh:
        if sweeps >= sweeps_max:
            raise RuntimeError("Jacobi sweep limit reached without convergence")
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a_v[p, q]
                if apq == 0.0:
                    continue
                app = a_v[p, p]
                aqq = a_v[q, q]
                tau = (aqq - app) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    if i != p and i != q:
                        akp = a_v[i, p]
                        akq = a_v[i, q]
                        a_v[i, p] = c * akp - s * akq
                        a_v[p, i] = a_v[i, p]
                        a_v[i, q] = s * akp + c * akq
                        a_v[q, i] = a_v[i, q]
                a_v[p, p] = app - t * apq
                a_v[q, q] = aqq + t * apq
                a_v[p, q] = 0.0
                a_v[q, p] = 0.0
                for i in range(n):
                    akp = vv[i, p]
                    akq = vv[i, q]
                    vv[i, p] = c * akp - s * akq
                    vv[i, q] = s * akp + c * akq
        sweeps += 1
        hv[n_hist] = _off_norm(a_v, n)
        n_hist += 1

    return np.diag(a).copy(), v, np.asarray(history[:n_hist]).copy()
