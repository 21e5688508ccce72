"""Independent reference computations used by the tests.

Nothing here imports the package's q-series or weight code; the products are
rebuilt from scratch (Euler series, plain loops) so agreement is meaningful.
"""

import math

import numpy as np


def qpoch_euler(a: complex, q: float, terms: int = 400) -> complex:
    """(a; q)_inf from Euler's series sum_k (-1)^k q^{k(k-1)/2} a^k / (q; q)_k."""
    total, qq = 0.0, 1.0
    for k in range(terms):
        if k:
            qq *= 1 - q**k
        term = (-1) ** k * q ** (k * (k - 1) / 2) * a**k / qq
        total += term
        if abs(term) < 1e-20 and k > 5:
            break
    return total


def qpoch_loop(a: complex, q: float, terms: int = 3000) -> complex:
    out = 1.0
    for l in range(terms):
        out *= 1 - a * q**l
    return out


def weight_nodes(theta: np.ndarray, alpha, beta, g, g0, g1, g2, g3) -> np.ndarray:
    """Weight at x = i*theta for an array of n-vectors theta of shape (K, n), by plain products."""
    q = math.exp(-alpha * beta)

    def qpow(s):
        return math.exp(-alpha * beta * s)

    def poch(z):
        return qpoch_loop(z, q, 800)

    K, n = theta.shape
    out = np.ones(K)
    for idx in range(K):
        x = 1j * theta[idx]
        val = 1.0 + 0j
        for j in range(n):
            for k in range(j + 1, n):
                for zz in (x[j] + x[k], x[j] - x[k], -x[j] + x[k], -x[j] - x[k]):
                    e = np.exp(-alpha * zz)
                    val *= poch(e) / poch(qpow(g) * e)
            for zz in (x[j], -x[j]):
                e = np.exp(-alpha * zz)
                val *= poch(e) * poch(-e) * poch(math.sqrt(q) * e) * poch(-math.sqrt(q) * e)
                val /= poch(qpow(g0) * e) * poch(-qpow(g1) * e) * poch(qpow(g2 + 0.5) * e) * poch(-qpow(g3 + 0.5) * e)
        out[idx] = val.real
    return out


def askey_wilson_mass(alpha, beta, g0, g1, g2, g3) -> float:
    """n = 1 total mass 2 (abcd; q) / [(q; q) prod_{pairs} (letter pair; q)]."""
    q = math.exp(-alpha * beta)
    qp = lambda s: math.exp(-alpha * beta * s)
    a, b, c, d = qp(g0), -qp(g1), qp(g2 + 0.5), -qp(g3 + 0.5)
    letters = [a, b, c, d]
    den = qpoch_euler(q, q)
    for i in range(4):
        for j in range(i + 1, 4):
            den *= qpoch_euler(letters[i] * letters[j], q)
    return 2 * qpoch_euler(a * b * c * d, q) / den
