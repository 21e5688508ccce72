"""q-shifted factorials, the orthogonality weight and the coefficient functions.

All functions accept numpy arrays and broadcast; an n-vector argument may carry
leading batch axes, i.e. shape ``(..., n)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .params import Params

POLE_GUARD = 1e-10


class NearPoleError(ArithmeticError):
    """A denominator came within the pole guard of zero."""

    def __init__(self, factor: str, magnitude: float):
        super().__init__(f"near-pole in {factor}: |denominator| = {magnitude:.3e}")
        self.factor = factor
        self.magnitude = magnitude


class PrecisionWarning(RuntimeWarning):
    """q-product truncated by the term cap before reaching the tail cutoff."""


@dataclass(frozen=True)
class QPochConfig:
    truncation_eps: float = 1e-17
    max_terms: int = 4096

    def __post_init__(self):
        if not self.truncation_eps > 0 or self.max_terms < 64:
            raise ValueError("need truncation_eps > 0 and max_terms >= 64")


DEFAULT_CFG = QPochConfig()


def _n_terms(amax: float, q: float, cfg: QPochConfig) -> int:
    if amax <= cfg.truncation_eps:
        return 1
    need = int(np.ceil(np.log(cfg.truncation_eps / amax) / np.log(q))) + 1
    need = max(need, 1)
    if need > cfg.max_terms:
        warnings.warn(
            f"q-product capped at {cfg.max_terms} terms (needs {need})", PrecisionWarning, stacklevel=3
        )
        return cfg.max_terms
    return need


def qpoch(a, q: float, cfg: QPochConfig = DEFAULT_CFG):
    """``(a; q)_inf`` truncated once ``|a| q^L`` drops below ``cfg.truncation_eps``."""
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    a = np.asarray(a)
    amax = float(np.max(np.abs(a))) if a.size else 0.0
    L = _n_terms(amax, q, cfg)
    out = np.ones_like(a, dtype=np.result_type(a, float))
    term = a.astype(out.dtype, copy=True)
    for _ in range(L):
        out = out * (1 - term)
        term = term * q
    return out if out.ndim else out[()]


def qpoch_multi(args, q: float, cfg: QPochConfig = DEFAULT_CFG):
    """``(a_1, ..., a_k; q)_inf`` as a product of single-argument factorials."""
    out = 1.0
    for a in args:
        out = out * qpoch(a, q, cfg)
    return out


def qpoch_ratio(num, den, q: float, cfg: QPochConfig = DEFAULT_CFG, label: str = "q-ratio"):
    """``prod (num_i; q)_inf / prod (den_i; q)_inf`` with a pole guard on every
    denominator factor ``1 - den_i q^l``."""
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    num = [np.asarray(a) for a in num]
    den = [np.asarray(a) for a in den]
    amax = max(float(np.max(np.abs(a))) for a in num + den)
    L = _n_terms(amax, q, cfg)
    dtype = np.result_type(*num, *den, float)
    shape = np.broadcast_shapes(*(a.shape for a in num + den))
    out = np.ones(shape, dtype=dtype)
    qk = 1.0
    for _ in range(L):
        for a in num:
            out = out * (1 - a * qk)
        for a in den:
            f = 1 - a * qk
            m = float(np.min(np.abs(f))) if np.size(f) else 1.0
            if m < POLE_GUARD:
                raise NearPoleError(label, m)
            out = out / f
        qk *= q
    return out if out.ndim else out[()]


def qpoch_finite(a, q: float, k: int):
    """Finite factorial ``(a; q)_k``."""
    out = np.ones_like(np.asarray(a), dtype=np.result_type(a, float))
    for l in range(k):
        out = out * (1 - a * q**l)
    return out


# -- orthogonality weight ---------------------------------------------------------


def _pairs(n):
    return [(j, k) for j in range(n) for k in range(j + 1, n)]


def d_v(z, p: Params, cfg: QPochConfig = DEFAULT_CFG):
    e = np.exp(-p.alpha * np.asarray(z))
    if p.g == 0:
        # numerator and denominator coincide
        return np.ones_like(e)
    return qpoch_ratio([e], [p.qpow(p.g) * e], p.q, cfg, label="d_v")


def d_w(z, p: Params, cfg: QPochConfig = DEFAULT_CFG):
    e = np.exp(-p.alpha * np.asarray(z))
    qp = p.qpow
    num, den = [], []
    # (sign, base shift, coupling) per factor pair; zero couplings cancel exactly
    for sign, shift, g in ((1, 0.0, p.g0), (-1, 0.0, p.g1), (1, 0.5, p.g2), (-1, 0.5, p.g3)):
        if g != 0:
            num.append(sign * qp(shift) * e)
            den.append(sign * qp(shift + g) * e)
    if not num:
        return np.ones_like(e)
    return qpoch_ratio(num, den, p.q, cfg, label="d_w")


def weight_delta(x, p: Params, cfg: QPochConfig = DEFAULT_CFG):
    """The weight as a product of ``d_v`` over pairs/signs and ``d_w`` over coordinates/signs."""
    x = np.asarray(x, dtype=complex)
    out = np.ones(x.shape[:-1], dtype=complex)
    for j, k in _pairs(p.n):
        for s1 in (1, -1):
            for s2 in (1, -1):
                out = out * d_v(s1 * x[..., j] + s2 * x[..., k], p, cfg)
    for j in range(p.n):
        for s in (1, -1):
            out = out * d_w(s * x[..., j], p, cfg)
    return out if out.ndim else out[()]


def weight_on_torus(theta, p: Params, cfg: QPochConfig = DEFAULT_CFG):
    """The weight at ``x = i*theta`` for a tensor grid given by the 1-D node array.

    Exploits the product structure: pair factors are tabulated on the 2-D grid
    and single-coordinate factors on the 1-D grid, then broadcast together.
    Returns a real array of shape ``(M,) * n``.
    """
    theta = np.asarray(theta, dtype=float)
    M = theta.size
    n = p.n
    z1 = 1j * theta
    single = (d_w(z1, p, cfg) * d_w(-z1, p, cfg)).real
    out = np.ones((M,) * n)
    for j in range(n):
        shape = [1] * n
        shape[j] = M
        out = out * single.reshape(shape)
    if n > 1:
        zs = 1j * (theta[:, None] + theta[None, :])
        zd = 1j * (theta[:, None] - theta[None, :])
        pair = (d_v(zs, p, cfg) * d_v(-zs, p, cfg) * d_v(zd, p, cfg) * d_v(-zd, p, cfg)).real
        for j, k in _pairs(n):
            shape = [1] * n
            shape[j] = M
            shape[k] = M
            out = out * pair.reshape(shape)
    return out


# -- half-weights evaluated at real points -----------------------------------------


def d_tilde_v(z, p: Params, cfg: QPochConfig = DEFAULT_CFG):
    """Uses the dual coupling ``g* = g``."""
    gs = p.dual().g
    z = np.asarray(z, dtype=float)
    qp = p.qpow
    return qp(-gs * z / 2) * qpoch_ratio([qp(z)], [qp(gs + z)], p.q, cfg, label="d~_v")


def d_tilde_w(z, p: Params, cfg: QPochConfig = DEFAULT_CFG):
    g0, g1, g2, g3 = p.dual().couplings
    z = np.asarray(z, dtype=float)
    qp = p.qpow
    num = [qp(z), -qp(z), qp(0.5 + z), -qp(0.5 + z)]
    den = [qp(g0 + z), -qp(g1 + z), qp(g2 + 0.5 + z), -qp(g3 + 0.5 + z)]
    return qp(-(g0 + g1 + g2 + g3) * z / 2) * qpoch_ratio(num, den, p.q, cfg, label="d~_w")


def d_hat_v(z, p: Params, cfg: QPochConfig = DEFAULT_CFG):
    """Satisfies ``d^_v(z+1) = v~(-z-1) d^_v(z)``."""
    gs = p.dual().g
    z = np.asarray(z, dtype=float)
    qp = p.qpow
    return qp(gs * z / 2) * qpoch_ratio([qp(z + 1)], [qp(-gs + z + 1)], p.q, cfg, label="d^_v")


def d_hat_w(z, p: Params, cfg: QPochConfig = DEFAULT_CFG):
    """Satisfies ``d^_w(z+1) = w~(-z-1) d^_w(z)``.

    Half-integer factors carry ``1/2 + z`` and the prefactor is
    ``q^{(g0*+..+g3*) z/2}``; this normalization makes the constant-term
    product identity hold exactly.
    """
    g0, g1, g2, g3 = p.dual().couplings
    z = np.asarray(z, dtype=float)
    qp = p.qpow
    num = [qp(z + 1), -qp(z + 1), qp(0.5 + z), -qp(0.5 + z)]
    den = [qp(-g0 + z + 1), -qp(-g1 + z + 1), qp(-g2 + 0.5 + z), -qp(-g3 + 0.5 + z)]
    return qp((g0 + g1 + g2 + g3) * z / 2) * qpoch_ratio(num, den, p.q, cfg, label="d^_w")


def _half_weight(y, p, dv, dw, cfg):
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != p.n:
        raise ValueError(f"expected an {p.n}-vector")
    out = np.ones(y.shape[:-1])
    for j, k in _pairs(p.n):
        out = out * dv(y[..., j] + y[..., k], p, cfg) * dv(y[..., j] - y[..., k], p, cfg)
    for j in range(p.n):
        out = out * dw(y[..., j], p, cfg)
    return out if out.ndim else float(out)


def delta_plus_tilde(y, p: Params, cfg: QPochConfig = DEFAULT_CFG):
    return _half_weight(y, p, d_tilde_v, d_tilde_w, cfg)


def delta_plus_hat(y, p: Params, cfg: QPochConfig = DEFAULT_CFG):
    return _half_weight(y, p, d_hat_v, d_hat_w, cfg)


# -- coefficient functions of the difference operators ---------------------------


def _guarded(den, label):
    m = float(np.min(np.abs(den))) if np.size(den) else 1.0
    if m < POLE_GUARD:
        raise NearPoleError(label, m)
    return den


@dataclass(frozen=True)
class CoeffFamily:
    """``v(z) = sh(c(G+z))/sh(cz)`` and the four-factor ``w(z)``, with shift ``step``.

    The plain family (operators acting on x) has ``c = alpha/2``, ``G = beta*g``,
    ``Gr = beta*g_r`` and half-step ``beta/2``; the dual family (recurrences in
    the spectral variable) has ``c = alpha*beta/2``, dual couplings and half-step
    ``1/2``. In both cases ``step = 2 * half``.
    """

    c: float
    G: float
    Gr: tuple[float, float, float, float]
    half: float

    @property
    def step(self) -> float:
        return 2 * self.half

    def v(self, z):
        c = self.c
        return np.sinh(c * (self.G + z)) / _guarded(np.sinh(c * z), "v")

    def w(self, z):
        c, h = self.c, self.half
        G0, G1, G2, G3 = self.Gr
        return (
            np.sinh(c * (G0 + z)) / _guarded(np.sinh(c * z), "w[sh]")
            * np.cosh(c * (G1 + z)) / _guarded(np.cosh(c * z), "w[ch]")
            * np.sinh(c * (G2 + h + z)) / _guarded(np.sinh(c * (h + z)), "w[sh+1/2]")
            * np.cosh(c * (G3 + h + z)) / _guarded(np.cosh(c * (h + z)), "w[ch+1/2]")
        )


def coeff_family(p: Params, dual: bool = False) -> CoeffFamily:
    if not dual:
        b = p.beta
        return CoeffFamily(p.alpha / 2, b * p.g, tuple(b * x for x in p.couplings), b / 2)
    d = p.dual()
    return CoeffFamily(p.alpha * p.beta / 2, d.g, d.couplings, 0.5)


def v_w_coeffs(z, p: Params, which: str):
    """Evaluate one of ``v``, ``w``, ``v_dual``, ``w_dual`` at ``z``."""
    fam = {"v": (False, "v"), "w": (False, "w"), "v_dual": (True, "v"), "w_dual": (True, "w")}
    if which not in fam:
        raise ValueError(f"unknown coefficient {which!r}")
    dual, name = fam[which]
    return getattr(coeff_family(p, dual), name)(np.asarray(z))
