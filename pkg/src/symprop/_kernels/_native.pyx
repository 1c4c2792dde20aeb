# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled profile-likelihood kernels.

Same contract as ``symprop._kernels._pure``: a dynamic program over
symbols whose state counts how many multiplicity parts of each distinct
value have been placed, with per-symbol rescaling so results come back
in log space.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, pow

cnp.import_array()

BACKEND = "native"


cdef void _build_plan(const long[::1] counts, long[::1] strides, long[:, ::1] digits):
    cdef Py_ssize_t d = counts.shape[0]
    cdef Py_ssize_t nstates = digits.shape[0]
    cdef Py_ssize_t j, s
    strides[0] = 1
    for j in range(1, d):
        strides[j] = strides[j - 1] * (counts[j - 1] + 1)
    for s in range(nstates):
        for j in range(d):
            digits[s, j] = (s // strides[j]) % (counts[j] + 1)


cdef double _sweep_row(const double[::1] p, const double[::1] mu_f, const long[::1] strides,
                       const long[:, ::1] digits, double[::1] F,
                       double[:, ::1] prefix, double[::1] prescale,
                       bint keep_prefix) nogil:
    """DP over one row; returns the log scale. F holds the scaled table."""
    cdef Py_ssize_t S = p.shape[0]
    cdef Py_ssize_t d = mu_f.shape[0]
    cdef Py_ssize_t nstates = F.shape[0]
    cdef Py_ssize_t i, s, j
    cdef double logscale = 0.0, mx, acc
    cdef double pw[64]

    for s in range(nstates):
        F[s] = 0.0
    F[0] = 1.0
    if keep_prefix:
        for s in range(nstates):
            prefix[0, s] = F[s]
        prescale[0] = 0.0
    for i in range(S):
        for j in range(d):
            pw[j] = pow(p[i], mu_f[j])
        for s in range(nstates - 1, -1, -1):
            acc = F[s]
            for j in range(d):
                if digits[s, j] > 0:
                    acc += pw[j] * F[s - strides[j]]
            F[s] = acc
        mx = 0.0
        for s in range(nstates):
            if F[s] > mx:
                mx = F[s]
        if mx > 0:
            for s in range(nstates):
                F[s] /= mx
            logscale += log(mx)
        if keep_prefix:
            for s in range(nstates):
                prefix[i + 1, s] = F[s]
            prescale[i + 1] = logscale
    return logscale


def msp_log_batch(probs, mu, counts):
    """Log monomial symmetric sum per row; -inf where it vanishes."""
    P_arr = np.ascontiguousarray(np.atleast_2d(np.asarray(probs, dtype=np.float64)))
    cdef const double[:, ::1] Pv = P_arr
    cdef const long[::1] mu_v = np.ascontiguousarray(mu, dtype=np.int64)
    cdef const long[::1] cnt_v = np.ascontiguousarray(counts, dtype=np.int64)
    cdef Py_ssize_t d = mu_v.shape[0]
    if d > 64:
        raise ValueError("more than 64 distinct multiplicities unsupported")
    cdef Py_ssize_t nstates = 1
    cdef Py_ssize_t j
    for j in range(d):
        nstates *= cnt_v[j] + 1
    cdef long[::1] strides = np.zeros(d, dtype=np.int64)
    cdef long[:, ::1] digits = np.zeros((nstates, d), dtype=np.int64)
    _build_plan(cnt_v, strides, digits)

    cdef double[::1] mu_f = np.asarray(mu, dtype=np.float64)
    cdef Py_ssize_t B = Pv.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(B, dtype=np.float64)
    cdef double[::1] F = np.zeros(nstates, dtype=np.float64)
    cdef double[:, ::1] dummy2 = np.zeros((1, 1), dtype=np.float64)
    cdef double[::1] dummy1 = np.zeros(1, dtype=np.float64)
    cdef Py_ssize_t b
    cdef double ls
    for b in range(B):
        ls = _sweep_row(Pv[b], mu_f, strides, digits, F, dummy2, dummy1, False)
        if F[nstates - 1] > 0:
            out[b] = log(F[nstates - 1]) + ls
        else:
            out[b] = -np.inf
    return out


def msp_log_grad_batch(probs, mu, counts):
    """(log m, d log m / d p) per row; zero gradient rows at -inf."""
    P_arr = np.ascontiguousarray(np.atleast_2d(np.asarray(probs, dtype=np.float64)))
    cdef const double[:, ::1] Pv = P_arr
    cdef const long[::1] mu_v = np.ascontiguousarray(mu, dtype=np.int64)
    cdef const long[::1] cnt_v = np.ascontiguousarray(counts, dtype=np.int64)
    cdef Py_ssize_t d = mu_v.shape[0]
    if d > 64:
        raise ValueError("more than 64 distinct multiplicities unsupported")
    cdef Py_ssize_t nstates = 1
    cdef Py_ssize_t j
    for j in range(d):
        nstates *= cnt_v[j] + 1
    cdef long[::1] strides = np.zeros(d, dtype=np.int64)
    cdef long[:, ::1] digits = np.zeros((nstates, d), dtype=np.int64)
    _build_plan(cnt_v, strides, digits)

    # prefix/suffix pair lists per part class
    pair_a = []
    pair_b = []
    cdef Py_ssize_t full = nstates - 1
    cdef Py_ssize_t target, s
    dg = np.asarray(digits)
    for j in range(d):
        target = full - strides[j]
        mask = np.all(dg <= dg[target], axis=1)
        a_idx = np.nonzero(mask)[0].astype(np.int64)
        pair_a.append(a_idx)
        pair_b.append(target - a_idx)

    cdef double[::1] mu_f = np.asarray(mu, dtype=np.float64)
    cdef Py_ssize_t B = Pv.shape[0]
    cdef Py_ssize_t S = Pv.shape[1]
    cdef cnp.ndarray[double, ndim=1] logm = np.empty(B, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] grad = np.zeros((B, S), dtype=np.float64)
    cdef double[:, ::1] gv = grad

    cdef double[:, ::1] fwd = np.zeros((S + 1, nstates), dtype=np.float64)
    cdef double[:, ::1] bwd = np.zeros((S + 1, nstates), dtype=np.float64)
    cdef double[::1] fsc = np.zeros(S + 1, dtype=np.float64)
    cdef double[::1] bsc = np.zeros(S + 1, dtype=np.float64)
    cdef double[::1] F = np.zeros(nstates, dtype=np.float64)
    cdef double[::1] prow = np.zeros(S, dtype=np.float64)

    cdef Py_ssize_t b, i, t, npairs
    cdef double lm, conv, tot, scale, pi
    cdef const long[::1] aj
    cdef const long[::1] bj

    for b in range(B):
        _sweep_row(Pv[b], mu_f, strides, digits, F, fwd, fsc, True)
        if fwd[S, nstates - 1] > 0:
            lm = log(fwd[S, nstates - 1]) + fsc[S]
        else:
            logm[b] = -np.inf
            continue
        logm[b] = lm
        for i in range(S):
            prow[i] = Pv[b, S - 1 - i]
        _sweep_row(prow, mu_f, strides, digits, F, bwd, bsc, True)
        for i in range(S):
            pi = Pv[b, i]
            tot = 0.0
            scale = fsc[i] + bsc[S - 1 - i] - lm
            for j in range(d):
                aj = pair_a[j]
                bj = pair_b[j]
                npairs = aj.shape[0]
                conv = 0.0
                for t in range(npairs):
                    conv += fwd[i, aj[t]] * bwd[S - 1 - i, bj[t]]
                if conv > 0:
                    tot += mu_f[j] * pow(pi, mu_f[j] - 1.0) * conv
            if tot > 0:
                if scale > 700.0:
                    scale = 700.0
                elif scale < -745.0:
                    scale = -745.0
                gv[b, i] = tot * exp(scale)
    return logm, grad
