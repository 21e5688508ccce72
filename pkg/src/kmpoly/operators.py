"""Coefficients V and U, eigenvalues, the difference operators D_r and their matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product
from typing import Callable, Sequence

import numpy as np

from .params import Params
from .partitions import Partition, SignedSet, as_partition, dominance_leq, down_set, format_partition, signed_sets
from .qseries import coeff_family
from .symcore import EXPANSION_TOL, NotInSpanError, eval_monomial, expand_from_samples


def _col(x, j):
    return np.asarray(x)[..., j]


def _ones(x):
    return np.ones(np.asarray(x).shape[:-1], dtype=np.result_type(np.asarray(x), float))


def coeff_V(s: SignedSet, K: Sequence[int], x, p: Params, dual: bool = False):
    """``V_{eps J, K}(x)``; ``x`` has shape ``(..., n)``."""
    K = tuple(K)
    if set(K) & set(s.members):
        raise ValueError("J and K must be disjoint")
    fam = coeff_family(p, dual)
    out = _ones(x)
    terms = [e * _col(x, j) for j, e in zip(s.members, s.signs)]
    for t in terms:
        out = out * fam.w(t)
    for a, b in combinations(range(len(terms)), 2):
        z = terms[a] + terms[b]
        out = out * fam.v(z) * fam.v(z + fam.step)
    for t in terms:
        for k in K:
            xk = _col(x, k)
            out = out * fam.v(t + xk) * fam.v(t - xk)
    return out


def coeff_U(K: Sequence[int], m: int, x, p: Params, dual: bool = False):
    """``U_{K, m}(x)`` as the signed sum over ``m``-subsets of ``K``."""
    K = tuple(K)
    if not 0 <= m <= len(K):
        raise ValueError(f"need 0 <= m <= |K| = {len(K)}")
    if m == 0:
        return _ones(x)
    fam = coeff_family(p, dual)
    total = 0
    for L in combinations(K, m):
        rest = [k for k in K if k not in L]
        for eps in product((1, -1), repeat=m):
            terms = [e * _col(x, l) for l, e in zip(L, eps)]
            term = _ones(x)
            for t in terms:
                term = term * fam.w(t)
            for a, b in combinations(range(m), 2):
                z = terms[a] + terms[b]
                term = term * fam.v(z) * fam.v(-z - fam.step)
            for t in terms:
                for k in rest:
                    xk = _col(x, k)
                    term = term * fam.v(t + xk) * fam.v(t - xk)
            total = total + term
    return (-1) ** m * total


def coeff_U_chain(K: Sequence[int], m: int, x, p: Params, dual: bool = False):
    """``U_{K, m}`` by peeling off nonempty signed blocks: an independent oracle for :func:`coeff_U`."""
    K = tuple(K)
    if not 0 <= m <= len(K):
        raise ValueError(f"need 0 <= m <= |K| = {len(K)}")
    return _chain(K, m, x, p, dual)


def _chain(K, m, x, p, dual):
    if m == 0:
        return _ones(x)
    total = 0
    for size in range(1, min(m, len(K)) + 1):
        for A in combinations(K, size):
            rest = tuple(k for k in K if k not in A)
            for eps in product((1, -1), repeat=size):
                total = total - coeff_V(SignedSet(A, eps), rest, x, p, dual) * _chain(rest, m - size, x, p, dual)
    return total


def eigen_E(y, p: Params):
    """``2 sum_j (ch(alpha beta y_j) - ch(alpha beta rho_j))``."""
    ab = p.alpha * p.beta
    y = np.asarray(y, dtype=float)
    return 2 * (np.cosh(ab * y) - np.cosh(ab * np.array(p.rho))).sum(axis=-1)


def _complete_homogeneous(vals: Sequence[float], k: int) -> float:
    return sum(float(np.prod(c)) for c in combinations_with_replacement(vals, k)) if k else 1.0


def eigen_Er(r: int, y, p: Params):
    """Eigenvalue of ``D_r`` at spectral point ``y``."""
    n = p.n
    if not 1 <= r <= n:
        raise ValueError(f"r must lie in 1..{n}")
    ab = p.alpha * p.beta
    y = np.asarray(y, dtype=float)
    chy = np.cosh(ab * y)
    # sum over r <= l_1 <= ... <= l_k <= n of prod ch(ab rho_l)
    tail = [float(np.cosh(ab * rho)) for rho in p.rho[r - 1 :]]
    total = 0
    for size in range(r + 1):
        h = _complete_homogeneous(tail, r - size)
        for J in combinations(range(n), size):
            term = np.ones(y.shape[:-1])
            for j in J:
                term = term * chy[..., j]
            total = total + (-1) ** (r - size) * h * term
    return 2**r * total


@dataclass
class DrTable:
    """Shifts and coefficient values of ``D_r`` precomputed at a batch of points."""

    r: int
    x: np.ndarray
    shifts: list
    coeffs: np.ndarray  # (T, K)

    @classmethod
    def build(cls, r: int, x, p: Params) -> "DrTable":
        x = np.atleast_2d(np.asarray(x, dtype=complex))
        n = p.n
        if not 1 <= r <= n:
            raise ValueError(f"r must lie in 1..{n}")
        shifts, coeffs = [], []
        for s in signed_sets(n, r):
            comp = s.complement(n)
            c = coeff_U(comp, r - len(s), x, p) * coeff_V(s, comp, x, p)
            shifts.append(np.array(s.vector(n)) * p.beta)
            coeffs.append(c)
        return cls(r, x, shifts, np.array(coeffs))

    def apply(self, f: Callable, with_scale: bool = False):
        vals = np.array([f(self.x + sh) for sh in self.shifts])
        terms = self.coeffs * vals
        out = terms.sum(axis=0)
        if with_scale:
            return out, np.abs(terms).max(axis=0)
        return out


def apply_Dr(r: int, f: Callable, x, p: Params, with_scale: bool = False):
    """``(D_r f)(x)`` for ``f`` acting on ``(..., n)`` batches."""
    x = np.asarray(x, dtype=complex)
    single = x.ndim == 1
    out = DrTable.build(r, x, p).apply(f, with_scale)
    if single:
        return tuple(o[0] for o in out) if with_scale else out[0]
    return out


def check_annihilation(r: int, x, p: Params, relative: bool = True):
    """``|sum_{J, eps} U_{J^c, r-|J|} V_{eps J, J^c}|`` at ``x``, divided by the term scale if ``relative``."""
    val, scale = apply_Dr(r, lambda y: np.ones(y.shape[:-1]), x, p, with_scale=True)
    res = np.abs(val)
    return res / np.maximum(scale, 1e-300) if relative else res


@dataclass
class OperatorMatrix:
    """``matrix[i, j]`` is the coefficient of ``m_{basis[j]}`` in ``D_r m_{basis[i]}``."""

    r: int
    basis: tuple
    matrix: np.ndarray
    residuals: np.ndarray = field(default=None)

    @property
    def entries(self) -> dict:
        return {(nu, mu): self.matrix[i, j] for i, nu in enumerate(self.basis) for j, mu in enumerate(self.basis)}

    def entry(self, row: Partition, col: Partition) -> complex:
        return self.matrix[self.basis.index(tuple(row)), self.basis.index(tuple(col))]

    def scale(self) -> float:
        return float(np.abs(self.matrix).max()) or 1.0

    def triangularity_residual(self) -> float:
        """Largest ``|entry(nu, mu)|`` with ``mu`` not below ``nu``, relative to the matrix scale."""
        bad = [
            abs(self.matrix[i, j])
            for i, nu in enumerate(self.basis)
            for j, mu in enumerate(self.basis)
            if not dominance_leq(mu, nu)
        ]
        return max(bad, default=0.0) / self.scale()

    def diagonal_residual(self, p: Params) -> float:
        ev = np.array([eigen_Er(self.r, np.add(p.rho, nu), p) for nu in self.basis])
        return float(np.abs(np.diag(self.matrix) - ev).max() / max(np.abs(ev).max(), self.scale()))

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "basis": [format_partition(b) for b in self.basis],
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }


def operator_matrix(r: int, lam: Partition, p: Params, tol: float = EXPANSION_TOL, seed: int = 7) -> OperatorMatrix:
    """Expand ``D_r m_nu`` over ``down_set(lam)`` for every ``nu`` in it."""
    return _operator_matrix(r, as_partition(lam), p, tol, seed)


@lru_cache(maxsize=256)
def _operator_matrix(r, lam, p, tol, seed):
    if len(lam) != p.n:
        raise ValueError(f"partition length {len(lam)} != n = {p.n}")
    basis = down_set(lam)
    rows, resid = [], []
    tables = {}

    def image(nu):
        def f(X):
            key = X.shape[0]
            if key not in tables:
                tables[key] = DrTable.build(r, X, p)
            t = tables[key]
            assert t.x is X or np.array_equal(t.x, X)
            return t.apply(lambda y: eval_monomial(nu, y, p), with_scale=True)

        return f

    for nu in basis:
        f = image(nu)
        cache = {}

        def vals(X, f=f, cache=cache):
            cache["v"] = f(X)
            return cache["v"][0]

        def scale(X, cache=cache):
            return cache["v"][1]

        try:
            exp = expand_from_samples(vals, basis, p, tol=tol, seed=seed, scale=scale)
        except NotInSpanError as err:
            raise NotInSpanError(err.residual, tol) from err
        rows.append([exp.poly[mu] for mu in basis])
        resid.append(exp.residual)
    return OperatorMatrix(r, basis, np.array(rows, dtype=complex), np.array(resid))
