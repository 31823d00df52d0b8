"""Pure numpy versions of the compiled kernels (same arithmetic, same order)."""
import numpy as np

from .rng import GOLDEN, MASK64, mix64_array, uniform_from_bits


def simulate_counts(keys, a, b, alpha, alpha_beta, n0, m0, steps, grid, counter0=0):
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    grid = np.ascontiguousarray(grid, dtype=np.int64)
    R, G = keys.shape[0], grid.shape[0]
    out = np.empty((R, G), dtype=np.int64)
    n = np.full(R, n0, dtype=np.int64)
    total0 = n0 + m0
    gi = 0
    while gi < G and grid[gi] == 0:
        out[:, gi] = n
        gi += 1
    for j in range(steps):
        ctr = counter0 + 2 * j + 1
        u1 = uniform_from_bits(mix64_array(keys + np.uint64((ctr * GOLDEN) & MASK64)))
        u2 = uniform_from_bits(mix64_array(keys + np.uint64(((ctr + 1) * GOLDEN) & MASK64)))
        x = n / float(total0 + j)
        bx = b * x
        q = np.where(u1 < alpha, a + bx, np.where(u1 < alpha_beta, a - bx, a))
        n += u2 < q
        while gi < G and grid[gi] == j + 1:
            out[:, gi] = n
            gi += 1
    return out


def exact_pmf(a_in, lam_in, n0, m0, n):
    a = np.longdouble(a_in)
    lam = np.longdouble(lam_in)
    p = np.zeros(n + 1, dtype=np.longdouble)
    p[0] = 1
    ks = np.arange(n0, n0 + n + 1, dtype=np.longdouble)
    for j in range(n):
        total = np.longdouble(n0 + m0 + j)
        q = a + lam * ks[: j + 1] / total
        new = np.empty(j + 2, dtype=np.longdouble)
        new[j + 1] = p[j] * q[j]
        new[1 : j + 1] = p[:j] * q[:j] + p[1 : j + 1] * (1 - q[1 : j + 1])
        new[0] = p[0] * (1 - q[0])
        p[: j + 2] = new
    return p
