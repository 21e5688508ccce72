"""Monomial symmetric functions, their linear combinations, and the torus inner product."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Callable, Iterable, Sequence

import numpy as np

from .params import Params
from .partitions import Partition, as_partition, format_partition, linear_extension_key, parse_partition
from .qseries import DEFAULT_CFG, QPochConfig, weight_on_torus

EXPANSION_TOL = 1e-8


class NotInSpanError(ValueError):
    def __init__(self, residual: float, tol: float):
        super().__init__(f"sampled function not in the span of the basis: residual {residual:.3e} > {tol:.1e}")
        self.residual = residual


@lru_cache(maxsize=None)
def orbit(lam: Partition) -> np.ndarray:
    """Distinct images of ``lam`` under permutations and sign flips, shape ``(|W lam|, n)``."""
    pts = set()
    for perm in set(permutations(lam)):
        nz = [i for i, x in enumerate(perm) if x != 0]
        for signs in product((1, -1), repeat=len(nz)):
            v = list(perm)
            for i, s in zip(nz, signs):
                v[i] = s * v[i]
            pts.add(tuple(v))
    arr = np.array(sorted(pts), dtype=float).reshape(len(pts), len(lam))
    arr.flags.writeable = False
    return arr


def eval_monomial(lam: Partition, x, p: Params):
    """``m_lam(x) = sum over the orbit of exp(alpha <lam', x>)``; ``x`` has shape ``(..., n)``."""
    x = np.asarray(x)
    out = np.exp(p.alpha * (x @ orbit(tuple(lam)).T)).sum(axis=-1)
    return out if np.ndim(out) else out[()]


class SymPoly:
    """A finite combination ``sum c_lam m_lam`` of monomial symmetric functions."""

    def __init__(self, coeffs: dict | None = None, n: int | None = None):
        self.coeffs = {}
        for lam, c in (coeffs or {}).items():
            self.coeffs[as_partition(lam)] = complex(c)
        lens = {len(lam) for lam in self.coeffs}
        if len(lens) > 1:
            raise ValueError("partitions of mixed length")
        self.n = lens.pop() if lens else n

    def __repr__(self):
        terms = ", ".join(f"{format_partition(k)}: {v:.6g}" for k, v in self.items())
        return f"SymPoly({{{terms}}})"

    def items(self):
        return sorted(self.coeffs.items(), key=lambda kv: linear_extension_key(kv[0]))

    def support(self) -> list[Partition]:
        return [k for k, _ in self.items()]

    def __call__(self, x, p: Params):
        return eval_sympoly(self, x, p)

    def __getitem__(self, lam):
        return self.coeffs.get(tuple(lam), 0.0)

    def __add__(self, other: "SymPoly") -> "SymPoly":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return SymPoly(out, n=self.n or other.n)

    def scaled(self, s: complex) -> "SymPoly":
        return SymPoly({k: s * v for k, v in self.coeffs.items()}, n=self.n)

    def leading(self) -> Partition | None:
        """The support element dominating every other one, if there is one."""
        from .partitions import dominance_leq

        supp = self.support()
        for lam in supp:
            if all(dominance_leq(mu, lam) for mu in supp):
                return lam
        return None

    def is_monic(self) -> bool:
        lam = self.leading()
        return lam is not None and self.coeffs[lam] == 1

    def to_json(self) -> list[dict]:
        return [
            {"partition": format_partition(k), "re": float(v.real), "im": float(v.imag)} for k, v in self.items()
        ]

    @classmethod
    def from_json(cls, entries: Iterable[dict]) -> "SymPoly":
        return cls({parse_partition(e["partition"]): complex(e["re"], e.get("im", 0.0)) for e in entries})

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def eval_sympoly(f: SymPoly, x, p: Params):
    x = np.asarray(x)
    if not f.coeffs:
        return np.zeros(x.shape[:-1], dtype=complex) if x.ndim > 1 else 0j
    out = 0
    for lam, c in f.coeffs.items():
        out = out + c * eval_monomial(lam, x, p)
    return out


def monomial_matrix(basis: Sequence[Partition], x, p: Params) -> np.ndarray:
    """Columns ``m_mu(x_k)`` for the batch ``x`` of shape ``(K, n)``."""
    return np.stack([eval_monomial(mu, x, p) for mu in basis], axis=-1)


# -- sample points --------------------------------------------------------------


def generic_points(n: int, count: int, p: Params, seed: int = 0, min_gap: float = 0.12) -> np.ndarray:
    """Seeded complex points ``delta + i*theta`` kept away from every coefficient pole.

    Rejection keeps ``|sh(alpha z/2)|`` and ``|ch(alpha z/2)|`` above ``min_gap``
    for all arguments ``z`` at which the difference-operator coefficients have
    denominators (``x_j``, ``x_j +- beta/2``, and ``+-x_j +- x_k + m*beta``).
    """
    rng = np.random.default_rng(seed)
    a, b = p.alpha, p.beta
    keep = []
    while len(keep) < count:
        theta = rng.uniform(-np.pi / a, np.pi / a, size=n)
        delta = rng.uniform(-0.25, 0.25, size=n) / a
        x = delta + 1j * theta
        args = list(x) + list(x + b / 2) + list(x - b / 2)
        for j in range(n):
            for k in range(j + 1, n):
                for s in (1, -1):
                    for m in (-1, 0, 1):
                        args += [x[j] + s * x[k] + m * b, -x[j] + s * x[k] + m * b]
        args = np.array(args)
        if min(np.abs(np.sinh(a * args / 2)).min(), np.abs(np.cosh(a * args / 2)).min()) > min_gap:
            keep.append(x)
    return np.array(keep)


@dataclass
class Expansion:
    poly: SymPoly
    residual: float
    samples: int


def expand_from_samples(
    f: Callable,
    basis: Sequence[Partition],
    p: Params,
    *,
    tol: float = EXPANSION_TOL,
    seed: int = 1,
    samples: int | None = None,
    scale: Callable | None = None,
) -> Expansion:
    """Least-squares coefficients of ``f`` in ``span{m_mu : mu in basis}``.

    ``f`` maps a ``(K, n)`` batch of points to ``K`` values. The relative fit
    residual is measured against ``||f||`` or, when given, against the norm of
    ``scale(points)`` (the per-point term magnitude of ``f``, used for functions
    that are themselves cancellations). One retry at twice the samples is made
    before raising :class:`NotInSpanError`.
    """
    basis = [as_partition(mu) for mu in basis]
    if len(set(basis)) != len(basis):
        raise ValueError("basis partitions must be distinct")
    n = len(basis[0])
    K = samples or 3 * len(basis) + 8
    for attempt in range(2):
        X = generic_points(n, K, p, seed=seed + attempt)
        A = monomial_matrix(basis, X, p)
        y = np.asarray(f(X), dtype=complex)
        c, *_ = np.linalg.lstsq(A, y, rcond=None)
        denom = np.linalg.norm(scale(X)) if scale is not None else np.linalg.norm(y)
        resid = float(np.linalg.norm(A @ c - y) / max(denom, 1e-300))
        if resid <= tol:
            break
        K *= 2
    else:
        raise NotInSpanError(resid, tol)
    return Expansion(SymPoly(dict(zip(basis, c))), resid, K)


# -- quadrature on the torus -----------------------------------------------------


@dataclass(frozen=True)
class QuadGrid:
    """Midpoint-uniform tensor grid with ``M`` nodes per dimension on ``(-pi/alpha, pi/alpha]``."""

    n: int
    M: int
    alpha: float = 1.0

    @property
    def theta(self) -> np.ndarray:
        h = 2 * np.pi / (self.alpha * self.M)
        return -np.pi / self.alpha + (np.arange(self.M) + 0.5) * h

    @property
    def node_weight(self) -> float:
        return float(self.M) ** (-self.n)

    def nodes(self) -> np.ndarray:
        """All nodes as an ``(M**n, n)`` array (only sensible for small grids)."""
        th = self.theta
        return np.stack(np.meshgrid(*([th] * self.n), indexing="ij"), axis=-1).reshape(-1, self.n)


def default_grid(n: int, maxdeg: int, alpha: float = 1.0) -> QuadGrid:
    return QuadGrid(n, max(32, 4 * maxdeg + 16), alpha)


def grid_for_accuracy(p: Params, maxdeg: int, tol: float = 1e-12, cap: int = 160) -> QuadGrid:
    """Grid whose aliasing error is below ``tol``.

    The weight's Fourier coefficients decay like ``r**k`` with ``r`` the largest
    letter modulus (``q^g`` from the pair factors, ``q^{g_r}``-type letters from
    the single-coordinate ones); the midpoint rule with ``M`` nodes aliases
    frequency ``M`` onto zero, and products of degree-``maxdeg`` polynomials
    shift that by ``2*maxdeg``.
    """
    ab = p.alpha * p.beta
    expo = [p.g0, p.g1, p.g2 + 0.5, p.g3 + 0.5]
    if p.n > 1:
        expo.append(p.g)
    e = max(min(expo), 0.05)
    M = 2 * maxdeg + int(np.ceil(np.log(1 / tol) / (ab * e))) + 8
    M = min(max(M, 16), cap)
    return QuadGrid(p.n, M + (M % 2), p.alpha)


def _check_grid(p: Params, grid: QuadGrid):
    if grid.n != p.n:
        raise ValueError(f"grid dimension {grid.n} != n = {p.n}")
    if grid.alpha != p.alpha:
        raise ValueError("grid period does not match alpha")


@lru_cache(maxsize=32)
def _weight_dft(p: Params, M: int, cfg: QPochConfig = DEFAULT_CFG) -> np.ndarray:
    grid = QuadGrid(p.n, M, p.alpha)
    W = np.fft.ifftn(weight_on_torus(grid.theta, p, cfg))
    W.flags.writeable = False
    return W


def weight_fourier(p: Params, M: int, k, cfg: QPochConfig = DEFAULT_CFG) -> np.ndarray:
    """``M^-n sum_nodes Delta(i theta) exp(i alpha <k, theta>)`` for integer vectors ``k`` of shape ``(..., n)``.

    With nodes ``theta_m = -pi/alpha + (m + 1/2) h`` the exponential splits as
    ``exp(i pi k (1/M - 1)) * exp(2 pi i k m / M)``, so the sum is a phase times
    an inverse DFT entry. The phase is not M-periodic in ``k``, hence ``k`` is
    passed unreduced.
    """
    k = np.asarray(k, dtype=int)
    W = _weight_dft(p, M, cfg)
    phase = np.exp(1j * np.pi * (1.0 / M - 1.0) * k.sum(axis=-1))
    return W[tuple(np.moveaxis(k % M, -1, 0))] * phase


def gram_matrix(basis: Sequence[Partition], p: Params, grid: QuadGrid, cfg: QPochConfig = DEFAULT_CFG):
    """``G[i, j] = <m_{basis[i]}, m_{basis[j]}>`` under the grid quadrature."""
    _check_grid(p, grid)
    orbs = [orbit(tuple(mu)).astype(int) for mu in basis]
    G = np.empty((len(basis), len(basis)), dtype=complex)
    for i, oi in enumerate(orbs):
        for j in range(i, len(basis)):
            diff = oi[:, None, :] - orbs[j][None, :, :]
            G[i, j] = weight_fourier(p, grid.M, diff, cfg).sum()
            G[j, i] = np.conj(G[i, j])
    return G


def inner_product(f: SymPoly, h: SymPoly, p: Params, grid: QuadGrid, cfg: QPochConfig = DEFAULT_CFG) -> complex:
    """``M^-n sum_nodes f(i theta) conj(h(i theta)) Delta(i theta)``."""
    fb, hb = f.support(), h.support()
    if not fb or not hb:
        return 0j
    basis = sorted(set(fb) | set(hb), key=linear_extension_key)
    G = gram_matrix(basis, p, grid, cfg)
    cf = np.array([f[mu] for mu in basis])
    ch = np.array([h[mu] for mu in basis])
    return complex(cf @ G @ np.conj(ch))


def inner_product_nodes(f: SymPoly, h: SymPoly, p: Params, grid: QuadGrid, cfg: QPochConfig = DEFAULT_CFG) -> complex:
    """Same quadrature as :func:`inner_product`, summed node by node."""
    _check_grid(p, grid)
    X = 1j * grid.nodes()
    W = weight_on_torus(grid.theta, p, cfg).reshape(-1)
    return complex(np.sum(f(X, p) * np.conj(h(X, p)) * W) * grid.node_weight)
