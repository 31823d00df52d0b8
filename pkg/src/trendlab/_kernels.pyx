# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: replicate simulation and the exact-distribution recursion.

Must stay bit-for-bit identical to ``trendlab._fallback``.
"""
import numpy as np

from libc.stdint cimport int64_t, uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MUL1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MUL2 = 0x94D049BB133111EBULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MUL1
    z = (z ^ (z >> 27)) * MUL2
    return z ^ (z >> 31)


cdef inline double draw(uint64_t key, uint64_t ctr) noexcept nogil:
    return <double>(mix64(key + ctr * GOLDEN) >> 11) * INV_2_53


def simulate_counts(const uint64_t[::1] keys, double a, double b, double alpha,
                    double alpha_beta, int64_t n0, int64_t m0, int64_t steps,
                    const int64_t[::1] grid, uint64_t counter0=0):
    cdef Py_ssize_t R = keys.shape[0]
    cdef Py_ssize_t G = grid.shape[0]
    out = np.empty((R, G), dtype=np.int64)
    cdef int64_t[:, ::1] ov = out
    cdef Py_ssize_t r, gi
    cdef int64_t j, n
    cdef int64_t total0 = n0 + m0
    cdef uint64_t key, ctr
    cdef double u1, u2, bx, shift
    with nogil:
        for r in range(R):
            key = keys[r]
            n = n0
            gi = 0
            while gi < G and grid[gi] == 0:
                ov[r, gi] = n
                gi += 1
            for j in range(steps):
                ctr = counter0 + <uint64_t>(2 * j + 1)
                u1 = draw(key, ctr)
                u2 = draw(key, ctr + 1)
                bx = b * (<double>n / <double>(total0 + j))
                # a + 0.0 == a and a + (-bx) == a - bx exactly; written branch-free
                shift = bx if u1 < alpha else (-bx if u1 < alpha_beta else 0.0)
                n += u2 < a + shift
                while gi < G and grid[gi] == j + 1:
                    ov[r, gi] = n
                    gi += 1
    return out


def exact_pmf(a_in, lam_in, int64_t n0, int64_t m0, int64_t n):
    pmf = np.zeros(n + 1, dtype=np.longdouble)
    cdef long double[::1] p = pmf
    cdef long double a = a_in
    cdef long double lam = lam_in
    cdef long double total, q_prev, q_cur, one = 1.0
    cdef int64_t j, i
    p[0] = 1.0
    with nogil:
        for j in range(n):
            total = <long double>(n0 + m0 + j)
            q_prev = a + lam * <long double>(n0 + j) / total
            p[j + 1] = p[j] * q_prev
            i = j
            while i >= 1:
                q_cur = q_prev
                q_prev = a + lam * <long double>(n0 + i - 1) / total
                p[i] = p[i - 1] * q_prev + p[i] * (one - q_cur)
                i -= 1
            p[0] = p[0] * (one - (a + lam * <long double>n0 / total))
    return pmf
