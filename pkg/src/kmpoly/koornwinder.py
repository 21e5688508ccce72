"""The polynomials p_lam by two routes, their renormalization, and the closed-form constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable

import numpy as np

from .operators import coeff_U, coeff_V, eigen_E, eigen_Er, operator_matrix
from .params import Params
from .partitions import Partition, add_move, as_partition, dominance_lt, down_set, signed_moves
from .qseries import (
    DEFAULT_CFG,
    NearPoleError,
    QPochConfig,
    delta_plus_hat,
    delta_plus_tilde,
    qpoch,
    qpoch_finite,
)
from .symcore import QuadGrid, SymPoly, eval_monomial, gram_matrix, grid_for_accuracy, inner_product

EIGEN_GUARD = 1e-10
NONZERO_GUARD = 1e-10
CONDITION_LIMIT = 1e12
COUPLING_EPS = 1e-4


class DegenerateSpectrumError(ArithmeticError):
    pass


class ConditioningError(ArithmeticError):
    def __init__(self, cond: float):
        super().__init__(f"Gram matrix numerically singular (condition {cond:.2e})")
        self.cond = cond


class LemmaNonzeroError(ArithmeticError):
    """``p_lam(beta rho*)`` vanished: the parameters are not generic."""


class ParameterDegeneracyError(ArithmeticError):
    pass


@dataclass
class KMPolynomial:
    lam: Partition
    coeffs: SymPoly
    params: Params
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.coeffs(x, self.params)

    def to_json(self) -> dict:
        from .partitions import format_partition

        return {
            "lambda": format_partition(self.lam),
            "method": self.method,
            "params": self.params.as_dict(),
            "coefficients": self.coeffs.to_json(),
            "diagnostics": self.diagnostics,
        }


def _check_lam(lam, p):
    lam = as_partition(lam)
    if len(lam) != p.n:
        raise ValueError(f"partition length {len(lam)} != n = {p.n}")
    return lam


def build_op(lam: Partition, p: Params) -> KMPolynomial:
    """Back-substitution in the triangular matrix of ``D_1`` on ``down_set(lam)``."""
    return _build_op(_check_lam(lam, p), p)


@lru_cache(maxsize=1024)
def _build_op(lam, p):
    A = operator_matrix(1, lam, p)
    basis = A.basis
    idx = {mu: i for i, mu in enumerate(basis)}
    E = {mu: float(eigen_E(np.add(p.rho, mu), p)) for mu in basis}
    guard = EIGEN_GUARD * max(1.0, max(abs(e) for e in E.values()))
    c = {lam: 1.0 + 0j}
    for mu in reversed(basis[:-1]):
        gap = E[lam] - E[mu]
        if abs(gap) < guard:
            raise DegenerateSpectrumError(f"E(rho+{lam}) == E(rho+{mu}) within guard")
        acc = sum(c[nu] * A.matrix[idx[nu], idx[mu]] for nu in c if dominance_lt(mu, nu))
        c[mu] = acc / gap
    if basis[-1] != lam:
        raise AssertionError("down-set must end at its generator")
    diag = {
        "expansion_residual": float(A.residuals.max()),
        "triangularity": A.triangularity_residual(),
    }
    return KMPolynomial(lam, SymPoly(c), p, "operator", diag)


def build_gs(lam: Partition, p: Params, grid: QuadGrid | None = None, cfg: QPochConfig = DEFAULT_CFG) -> KMPolynomial:
    """``m_lam`` minus its projection onto the lower monomials, under the grid inner product."""
    lam = _check_lam(lam, p)
    if p.n > 3:
        raise ValueError("quadrature route supports n <= 3")
    grid = grid or grid_for_accuracy(p, 2 * lam[0])
    return _build_gs(lam, p, grid, cfg)


@lru_cache(maxsize=1024)
def _build_gs(lam, p, grid, cfg):
    basis = down_set(lam)
    lower = list(basis[:-1])
    if not lower:
        return KMPolynomial(lam, SymPoly({lam: 1.0}), p, "gram_schmidt", {"condition": 1.0, "M": grid.M})
    G = gram_matrix(basis, p, grid, cfg)
    Gl = G[:-1, :-1]
    b = G[-1, :-1]
    cond = float(np.linalg.cond(Gl))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise ConditioningError(cond)
    # sum_mu a_mu <m_mu, m_nu> = <m_lam, m_nu>
    a = np.linalg.solve(Gl.T, b)
    coeffs = {mu: -a[i] for i, mu in enumerate(lower)}
    coeffs[lam] = 1.0
    return KMPolynomial(lam, SymPoly(coeffs), p, "gram_schmidt", {"condition": cond, "M": grid.M})


def build(lam: Partition, p: Params, method: str = "op", grid: QuadGrid | None = None) -> KMPolynomial:
    if method in ("op", "operator"):
        return build_op(lam, p)
    if method in ("gs", "gram_schmidt"):
        return build_gs(lam, p, grid)
    raise ValueError(f"unknown method {method!r}")


def coefficient_deviation(a: KMPolynomial, b: KMPolynomial) -> float:
    """Largest coefficientwise difference relative to the largest coefficient."""
    keys = set(a.coeffs.coeffs) | set(b.coeffs.coeffs)
    diff = max(abs(a.coeffs[k] - b.coeffs[k]) for k in keys)
    size = max(max(abs(a.coeffs[k]), abs(b.coeffs[k])) for k in keys)
    return diff / size


# -- renormalized polynomials -------------------------------------------------------


@dataclass
class NormalizedEval:
    """``x -> p_lam(beta x) / p_lam(beta rho*)`` for real ``x`` of shape ``(..., n)``."""

    lam: Partition
    denominator: float
    poly: KMPolynomial

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        val = self.poly(self.poly.params.beta * x) / self.denominator
        return np.real(val) if np.ndim(val) else float(np.real(val))

    def term_scale(self, x):
        """Sum of ``|c_mu m_mu(beta x)|`` over the expansion, divided by ``|denominator|``."""
        p = self.poly.params
        x = p.beta * np.asarray(x, dtype=float)
        total = sum(abs(c) * np.abs(eval_monomial(mu, x, p)) for mu, c in self.poly.coeffs.items())
        return total / abs(self.denominator)


def normalized(lam: Partition, p: Params) -> NormalizedEval:
    return _normalized(_check_lam(lam, p), p)


@lru_cache(maxsize=1024)
def _normalized(lam, p):
    poly = build_op(lam, p)
    x = p.beta * np.array(p.rho_star)
    terms = [c * eval_monomial(mu, x, p) for mu, c in poly.coeffs.items()]
    den = complex(sum(terms))
    size = sum(abs(t) for t in terms)
    if abs(den) < NONZERO_GUARD * size:
        raise LemmaNonzeroError(f"p_{lam}(beta rho*) = {den:.3e} is below the guard")
    return NormalizedEval(lam, float(den.real), poly)


def dual_normalized(mu: Partition, p: Params) -> NormalizedEval:
    """The renormalized polynomial for the dual parameters."""
    return normalized(mu, p.dual())


def eval_at_rho_star(lam: Partition, p: Params) -> float:
    """Direct evaluation ``p_lam(beta rho*)`` of the operator-route polynomial."""
    return normalized(lam, p).denominator


# -- closed forms -------------------------------------------------------------------


def _zero_coupling_limit(func: Callable[[Params], float], p: Params, eps: float = COUPLING_EPS) -> float:
    """Evaluate ``func`` directly, or as a one-sided limit when zero couplings give 0/0.

    Only couplings that are exactly zero are moved, to ``eps``, ``eps/2`` and
    ``eps/4``; the combination ``(8 f(eps/4) - 6 f(eps/2) + f(eps)) / 3``
    cancels the first- and second-order terms.
    """
    try:
        return func(p)
    except NearPoleError:
        names = [k for k in ("g", "g0", "g1", "g2", "g3") if getattr(p, k) == 0]
        if not names:
            raise
        f1, f2, f4 = (func(p.replace(**{k: eps / m for k in names})) for m in (1, 2, 4))
        return (8 * f4 - 6 * f2 + f1) / 3


def evaluation_constant(lam: Partition, p: Params, cfg: QPochConfig = DEFAULT_CFG) -> float:
    """``Delta~+(rho+lam) / Delta~+(rho)``."""
    lam = _check_lam(lam, p)

    def f(q: Params):
        return float(delta_plus_tilde(np.add(q.rho, lam), q, cfg) / delta_plus_tilde(np.array(q.rho), q, cfg))

    return _zero_coupling_limit(f, p)


def norm_closed_form(lam: Partition, p: Params, cfg: QPochConfig = DEFAULT_CFG) -> float:
    """``2^n n! Delta~+(rho+lam) Delta^+(rho+lam)``."""
    lam = _check_lam(lam, p)

    def f(q: Params):
        y = np.add(q.rho, lam)
        return float(2**q.n * math.factorial(q.n) * delta_plus_tilde(y, q, cfg) * delta_plus_hat(y, q, cfg))

    return _zero_coupling_limit(f, p)


def norm_quadrature(lam: Partition, p: Params, grid: QuadGrid | None = None, cfg: QPochConfig = DEFAULT_CFG) -> float:
    lam = _check_lam(lam, p)
    grid = grid or grid_for_accuracy(p, 2 * lam[0])
    poly = build_op(lam, p).coeffs
    return float(inner_product(poly, poly, p, grid, cfg).real)


def gustafson_constant(p: Params, cfg: QPochConfig = DEFAULT_CFG) -> float:
    """Explicit product for ``<1, 1>`` in the letters ``t, a, b, c, d``.

    The ratio ``(t; q)/(t^j; q)`` is written as
    ``[(1 - t)/(1 - t^j)] (tq; q)/(t^j q; q)`` with the bracket from ``expm1``,
    which stays exact as ``g -> 0`` (where it tends to ``1/j``).
    """
    n = p.n
    q = p.q
    ab = p.alpha * p.beta
    t, *letters = p.letters
    abcd = letters[0] * letters[1] * letters[2] * letters[3]
    out = 2**n * math.factorial(n)
    for j in range(1, n + 1):
        bracket = 1.0 / j if p.g == 0 else math.expm1(-ab * p.g) / math.expm1(-ab * p.g * j)
        num = qpoch(t * q, q, cfg) * qpoch(abcd * t ** (n + j - 2), q, cfg)
        den = qpoch(q, q, cfg) * qpoch(t**j * q, q, cfg)
        for r, s in combinations(range(4), 2):
            den *= qpoch(letters[r] * letters[s] * t ** (j - 1), q, cfg)
        out *= bracket * num / den
    return float(out)


def gustafson_factored(p: Params, cfg: QPochConfig = DEFAULT_CFG) -> float:
    """``2^n n! Delta~+(rho) Delta^+(rho)``."""
    return norm_closed_form((0,) * p.n, p, cfg)


# -- recurrences ----------------------------------------------------------------------

LIMIT_DELTA = 1e-5


def pieri_coefficient(r: int, s, lam: Partition, p: Params) -> float:
    """``U~_{J^c, r-|J|}(rho+lam) V~_{eps J, J^c}(rho+lam)``.

    When the evaluation point sits on a removable singularity of individual
    factors (possible for integer couplings), the value is taken as the
    symmetric limit in ``g``.
    """

    def f(q: Params):
        comp = s.complement(q.n)
        y = np.add(q.rho, lam)
        return float(np.real(coeff_U(comp, r - len(s), y, q, dual=True) * coeff_V(s, comp, y, q, dual=True)))

    try:
        return f(p)
    except NearPoleError:
        d = LIMIT_DELTA
        return 0.5 * (f(p.replace(g=p.g + d)) + f(p.replace(g=p.g - d)))


def pieri_terms(r: int, lam: Partition, p: Params) -> list:
    """``(move, coefficient, lam + move)`` over all moves that stay in Lambda."""
    lam = _check_lam(lam, p)
    return [(s, pieri_coefficient(r, s, lam, p), add_move(lam, s)) for s in signed_moves(lam, r)]


def pieri_lhs(r: int, lam: Partition, x, p: Params):
    """``E*_r(x) p~_lam(x)``."""
    return eigen_Er(r, x, p.dual()) * normalized(lam, p)(x)


def pieri_rhs(r: int, lam: Partition, x, p: Params, with_scale: bool = False):
    terms = np.array([c * normalized(nu, p)(x) for _, c, nu in pieri_terms(r, lam, p)])
    out = terms.sum(axis=0)
    if with_scale:
        return out, np.abs(terms).max(axis=0)
    return out


def phi43(l: int, x, p: Params, with_scale: bool = False):
    """Terminating balanced 4phi3 for the one-variable polynomial."""
    if p.n != 1:
        raise ValueError("phi43 needs n = 1")
    q = p.q
    qp = p.qpow
    gs0 = p.dual().g0
    x = np.asarray(x, dtype=float)
    upper = [qp(-l), qp(2 * gs0 + l), qp(p.g0 - x), qp(p.g0 + x)]
    lower = [-qp(p.g0 + p.g1), qp(p.g0 + p.g2 + 0.5), -qp(p.g0 + p.g3 + 0.5), q]
    total = np.zeros_like(x)
    size = np.zeros_like(x)
    for k in range(l + 1):
        den = np.prod([qpoch_finite(b, q, k) for b in lower])
        if abs(den) < NONZERO_GUARD:
            raise ParameterDegeneracyError("lower-parameter q-factorial vanishes")
        num = 1.0
        for a in upper:
            num = num * qpoch_finite(a, q, k)
        term = num / den * q**k
        total = total + term
        size = size + np.abs(term)
    if with_scale:
        return (total, size) if total.ndim else (float(total), float(size))
    return total if total.ndim else float(total)
