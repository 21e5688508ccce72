"""Named identity checks over parameter and partition sweeps, reported as structured records."""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, replace
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from . import koornwinder as km
from .operators import apply_Dr, check_annihilation, coeff_U, coeff_U_chain, coeff_V, eigen_Er, operator_matrix
from .params import Params, default_param_sets, make_params
from .partitions import add_move, partitions_up_to, signed_sets
from .qseries import POLE_GUARD, NearPoleError
from .symcore import QuadGrid, SymPoly, generic_points, grid_for_accuracy, inner_product

CHECK_IDS = (
    "orthogonality",
    "difference_equations",
    "duality",
    "pieri",
    "evaluation_formula",
    "norm_formula",
    "gustafson",
    "n1_hypergeometric",
    "uv_annihilation",
    "u_chain_equality",
    "lemma_res_pattern",
    "method_agreement",
    "symmetry",
    "triangularity",
    "commutativity",
)

QUADRATURE_MAX_N = 3
# nudge applied to g when an integer coupling puts a coefficient on a 0*inf point
GENERIC_NUDGE = 1e-3

# off the self-dual hyperplane, with nonnegative dual couplings
OFF_HYPERPLANE = dict(g=0.6, g0=1.2, g1=0.5, g2=0.4, g3=0.1)


class UnknownCheckError(KeyError):
    pass


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    ns: tuple = (1, 2, 3)
    max_weight: int = 4
    seed: int = 0
    grid: int | None = None
    offhyperplane: bool = False
    param_sets: tuple | None = None  # couplings dicts; defaults to the three self-dual sets
    points: int = 20

    def params_for(self, n: int) -> list[Params]:
        if self.param_sets is None:
            return default_param_sets(n)
        return [make_params(n, **c) for c in self.param_sets]


@dataclass
class Report:
    """Outcome of one check.

    Every case carries its own tolerance; ``passed`` holds when no case errored
    and each residual is within its tolerance. ``tolerance`` is the strictest
    case tolerance, so for single-tolerance checks ``passed`` is exactly
    ``max_relative_residual <= tolerance``.
    """

    check_id: str
    params_digest: str
    cases: list
    max_relative_residual: float
    passed: bool
    runtime_ms: int
    tolerance: float
    experimental: bool = False

    def to_json(self, with_runtime: bool = False) -> str:
        d = {
            "check_id": self.check_id,
            "experimental": self.experimental,
            "params_digest": self.params_digest,
            "tolerance": self.tolerance,
            "max_relative_residual": self.max_relative_residual,
            "passed": self.passed,
            "cases": self.cases,
        }
        if with_runtime:
            d["runtime_ms"] = self.runtime_ms
        return json.dumps(d, indent=1, sort_keys=True, default=_jsonable)

    def summary(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        if self.experimental:
            flag += " (experimental)"
        return (
            f"{self.check_id:22s} {flag:20s} max residual {self.max_relative_residual:.2e} "
            f"tol {self.tolerance:.0e} cases {len(self.cases)} ({self.runtime_ms} ms)"
        )


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(type(x))


class _Collector:
    def __init__(self):
        self.cases = []
        self.params = []

    def use(self, p: Params):
        if p.digest() not in self.params:
            self.params.append(p.digest())

    def add(self, case: str, residual: float, tolerance: float, scale: float = 1.0, **extra):
        self.cases.append(
            dict(case=case, residual=float(residual), scale=float(scale), tolerance=tolerance, **extra)
        )

    def error(self, case: str, tolerance: float, err: Exception):
        self.cases.append(dict(case=case, residual=None, scale=None, tolerance=tolerance, error=repr(err)))

    def run(self, case: str, tolerance: float, fn: Callable):
        """Run ``fn() -> (residual, scale)`` and record it, turning exceptions into errored cases."""
        try:
            res, scale = fn()
        except Exception as err:  # recorded, never swallowed silently
            self.error(case, tolerance, err)
            return
        self.add(case, res, tolerance, scale)

    def report(self, check_id: str, t0: float, experimental: bool = False) -> Report:
        done = [c for c in self.cases if c["residual"] is not None]
        ok = all(c["residual"] is not None and c["residual"] <= c["tolerance"] for c in self.cases)
        worst = max((c["residual"] for c in done), default=0.0)
        tol = min((c["tolerance"] for c in self.cases), default=0.0)
        digest = hashlib.sha1(",".join(self.params).encode()).hexdigest()[:12]
        return Report(
            check_id, digest, self.cases, worst, bool(ok and self.cases), int(1000 * (time.time() - t0)), tol,
            experimental,
        )


def _ns(cfg: Config, cap: int | None = None) -> list[int]:
    return [n for n in cfg.ns if cap is None or n <= cap]


def _lam(lam) -> str:
    return "(" + ",".join(map(str, lam)) + ")"


def _pname(p: Params) -> str:
    return f"n={p.n},g={p.g},g0={p.g0},g1={p.g1},g2={p.g2},g3={p.g3}"


# -- checks ------------------------------------------------------------------------------


def check_difference_equations(cfg: Config, col: _Collector):
    tol = 1e-7
    for n in _ns(cfg):
        for ip, p in enumerate(cfg.params_for(n)):
            col.use(p)
            X = generic_points(n, cfg.points, p, seed=cfg.seed + 101 * n + ip)
            for lam in partitions_up_to(n, cfg.max_weight):
                for r in range(1, n + 1):

                    def fn(lam=lam, r=r, p=p, X=X):
                        P = km.build_op(lam, p)
                        val, scale = apply_Dr(r, P, X, p, with_scale=True)
                        res = np.abs(val - eigen_Er(r, np.add(p.rho, lam), p) * P(X)) / scale
                        return float(res.max()), float(scale.max())

                    col.run(f"{_pname(p)} lam={_lam(lam)} r={r}", tol, fn)


def _orthogonality_at(cfg, col, M, tol, tag):
    for n in _ns(cfg, 2):
        for p in cfg.params_for(n):
            col.use(p)
            grid = QuadGrid(n, M)
            lams = partitions_up_to(n, min(cfg.max_weight, 3))
            try:
                polys = [km.build_op(l, p).coeffs for l in lams]
                norms = [inner_product(f, f, p, grid).real for f in polys]
            except Exception as err:
                col.error(f"{_pname(p)} M={M}", tol, err)
                continue
            for i, j in combinations(range(len(lams)), 2):
                scale = math.sqrt(abs(norms[i] * norms[j]))
                res = abs(inner_product(polys[i], polys[j], p, grid)) / scale
                col.add(f"{_pname(p)} {_lam(lams[i])} vs {_lam(lams[j])} {tag}", res, tol, scale, M=M)


def check_orthogonality(cfg: Config, col: _Collector):
    M = cfg.grid or 48
    _orthogonality_at(cfg, col, M, 1e-7, f"M={M}")
    _orthogonality_at(cfg, col, M // 2, 1e-5, f"M={M // 2} (half grid)")


def _duality_cases(p: Params, col: _Collector, w: int, tol: float):
    lams = partitions_up_to(p.n, w)
    d = p.dual()
    for lam in lams:
        for mu in lams:

            def fn(lam=lam, mu=mu):
                a = km.normalized(lam, p)(np.add(p.rho_star, mu))
                b = km.normalized(mu, d)(np.add(p.rho, lam))
                scale = max(abs(a), abs(b))
                return abs(a - b) / scale, scale

            col.run(f"{_pname(p)} lam={_lam(lam)} mu={_lam(mu)}", tol, fn)


def _off_params(n):
    return make_params(n, **OFF_HYPERPLANE)


def check_duality(cfg: Config, col: _Collector):
    for n in _ns(cfg):
        for p in ([_off_params(n)] if cfg.offhyperplane else cfg.params_for(n)):
            col.use(p)
            _duality_cases(p, col, cfg.max_weight, 1e-7)


def check_evaluation_formula(cfg: Config, col: _Collector):
    tol = 1e-7
    for n in _ns(cfg):
        for p in ([_off_params(n)] if cfg.offhyperplane else cfg.params_for(n)):
            col.use(p)
            for lam in partitions_up_to(n, cfg.max_weight):

                def fn(lam=lam, p=p):
                    direct = km.eval_at_rho_star(lam, p)
                    closed = km.evaluation_constant(lam, p)
                    if p.is_nonnegative() and not (direct > 0 and closed > 0):
                        raise ArithmeticError(f"nonpositive evaluation: {direct}, {closed}")
                    return abs(direct / closed - 1), abs(closed)

                col.run(f"{_pname(p)} lam={_lam(lam)}", tol, fn)


def check_norm_formula(cfg: Config, col: _Collector):
    tol = 1e-6
    M = cfg.grid or 48
    for n in _ns(cfg, 2):
        for p in ([_off_params(n)] if cfg.offhyperplane else cfg.params_for(n)):
            col.use(p)
            for lam in partitions_up_to(n, min(cfg.max_weight, 3)):

                def fn(lam=lam, p=p):
                    quad = km.norm_quadrature(lam, p, QuadGrid(n, M))
                    closed = km.norm_closed_form(lam, p)
                    return abs(quad / closed - 1), abs(closed)

                col.run(f"{_pname(p)} lam={_lam(lam)} M={M}", tol, fn)


def check_gustafson(cfg: Config, col: _Collector):
    for n in _ns(cfg, QUADRATURE_MAX_N):
        one = SymPoly({(0,) * n: 1.0})
        sets = cfg.params_for(n) + [_off_params(n)]
        for p in sets:
            col.use(p)
            if n == 3:
                grid, tol = QuadGrid(n, cfg.grid or 32), 1e-5
            else:
                grid, tol = (QuadGrid(n, cfg.grid) if cfg.grid else grid_for_accuracy(p, 0, tol=1e-13)), 1e-7

            def quad(p=p, grid=grid):
                val = inner_product(one, one, p, grid).real
                prod = km.gustafson_constant(p)
                return abs(val / prod - 1), prod

            col.run(f"{_pname(p)} quadrature M={grid.M}", tol, quad)

            def factored(p=p):
                prod = km.gustafson_constant(p)
                return abs(km.gustafson_factored(p) / prod - 1), prod

            col.run(f"{_pname(p)} factored half-weights", 1e-8, factored)


def check_pieri(cfg: Config, col: _Collector):
    tol = 1e-6
    for n in _ns(cfg):
        for ip, p in enumerate(cfg.params_for(n)):
            col.use(p)
            rng = np.random.default_rng(cfg.seed + 17 * n + ip)
            X = rng.uniform(-1.5, 1.5, size=(cfg.points, n))
            for lam in partitions_up_to(n, min(cfg.max_weight, 3)):
                for r in range(1, n + 1):

                    def fn(lam=lam, r=r, p=p):
                        lhs = km.pieri_lhs(r, lam, X, p)
                        rhs, scale = km.pieri_rhs(r, lam, X, p, with_scale=True)
                        scale = np.maximum(scale, np.abs(lhs))
                        return float((np.abs(lhs - rhs) / scale).max()), float(scale.max())

                    col.run(f"{_pname(p)} lam={_lam(lam)} r={r}", tol, fn)


def check_n1_hypergeometric(cfg: Config, col: _Collector):
    tol = 1e-8
    rng = np.random.default_rng(cfg.seed + 5)
    X = rng.uniform(-1.5, 1.5, size=cfg.points)
    sets = default_param_sets(1) + [_off_params(1)]
    for p in sets:
        col.use(p)
        for l in range(6):

            def fn(l=l, p=p):
                pt = km.normalized((l,), p)
                a, sa = pt(X[:, None]), pt.term_scale(X[:, None])
                b, sb = km.phi43(l, X, p, with_scale=True)
                scale = np.maximum(sa, sb)
                return float((np.abs(a - b) / scale).max()), float(scale.max())

            col.run(f"{_pname(p)} 4phi3 l={l}", tol, fn)
        d = p.dual()
        for l in range(5):
            for m in range(5):

                def dual_fn(l=l, m=m, p=p, d=d):
                    a = km.normalized((l,), p)(np.array([p.g0 + m]))
                    b = km.normalized((m,), d)(np.array([d.g0 + l]))
                    scale = max(abs(a), abs(b))
                    return abs(a - b) / scale, scale

                col.run(f"{_pname(p)} duality l={l} m={m}", tol, dual_fn)


def check_uv_annihilation(cfg: Config, col: _Collector):
    tol = 1e-9
    for n in range(1, 5):
        for ip, p in enumerate(default_param_sets(n) if cfg.param_sets is None else cfg.params_for(n)):
            col.use(p)
            X = generic_points(n, cfg.points, p, seed=cfg.seed + 31 * n + ip)
            for r in range(1, n + 1):
                col.run(f"{_pname(p)} r={r}", tol, lambda r=r, p=p, X=X: (float(check_annihilation(r, X, p).max()), 1.0))


def check_u_chain_equality(cfg: Config, col: _Collector, cases: int = 50):
    tol = 1e-10
    rng = np.random.default_rng(cfg.seed + 77)
    sets = default_param_sets(1)
    for k in range(cases):
        n = int(rng.integers(1, 5))
        p = make_params(n, **{key: v for key, v in zip(("g", "g0", "g1", "g2", "g3"), _coup(sets, k))})
        col.use(p)
        size = int(rng.integers(1, n + 1))
        K = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        m = int(rng.integers(1, min(3, size) + 1))
        dual = bool(rng.integers(0, 2))
        X = generic_points(n, 1, p, seed=cfg.seed + 1000 + k)[0]
        if dual:
            X = rng.uniform(-1.0, 1.0, n) + 0.4j * rng.uniform(-1, 1, n)

        def fn(K=K, m=m, p=p, X=X, dual=dual):
            a = coeff_U(K, m, X, p, dual)
            b = coeff_U_chain(K, m, X, p, dual)
            scale = max(abs(a), abs(b))
            return abs(a - b) / scale, scale

        col.run(f"{_pname(p)} K={K} m={m} dual={dual}", tol, fn)


def _coup(sets, k):
    p = sets[k % len(sets)]
    return (p.g, p.g0, p.g1, p.g2, p.g3)


def check_lemma_res_pattern(cfg: Config, col: _Collector):
    """Binary check: residual 0 when the vanishing pattern holds for the case, 1 otherwise."""
    guard = POLE_GUARD
    for n in _ns(cfg):
        for p in cfg.params_for(n):
            col.use(p)
            for lam in partitions_up_to(n, cfg.max_weight):
                vals, nudged = {}, []
                for s in signed_sets(n, n):
                    if not len(s):
                        continue
                    try:
                        vals[s] = abs(coeff_V(s, s.complement(n), np.add(p.rho, lam), p, dual=True))
                    except NearPoleError:
                        q = p.replace(g=p.g + GENERIC_NUDGE)
                        vals[s] = abs(coeff_V(s, s.complement(n), np.add(q.rho, lam), q, dual=True))
                        nudged.append(str(s))
                scale = max(vals.values())
                wrong = [str(s) for s, v in vals.items() if (v < guard) != (add_move(lam, s) is None)]
                col.add(
                    f"{_pname(p)} lam={_lam(lam)}", float(bool(wrong)), 0.0, scale,
                    mismatches=wrong, nudged=nudged,
                )


def check_method_agreement(cfg: Config, col: _Collector):
    tol = 1e-7
    for n in _ns(cfg, QUADRATURE_MAX_N):
        for p in cfg.params_for(n):
            col.use(p)
            for lam in partitions_up_to(n, cfg.max_weight):

                def fn(lam=lam, p=p):
                    grid = QuadGrid(n, cfg.grid) if cfg.grid else None
                    return km.coefficient_deviation(km.build_op(lam, p), km.build_gs(lam, p, grid)), 1.0

                col.run(f"{_pname(p)} lam={_lam(lam)}", tol, fn)


def check_symmetry(cfg: Config, col: _Collector):
    tol = 1e-7
    for n in _ns(cfg, 2):
        for p in cfg.params_for(n):
            col.use(p)
            w = min(cfg.max_weight, 3)
            lams = partitions_up_to(n, w)
            grid = QuadGrid(n, cfg.grid) if cfg.grid else grid_for_accuracy(p, 2 * w + 2)
            images = {}
            for lam in lams:
                A = operator_matrix(1, lam, p)
                images[lam] = SymPoly({mu: A.entry(lam, mu) for mu in A.basis})
            for lam, mu in combinations(lams, 2):
                ml, mm = SymPoly({lam: 1}), SymPoly({mu: 1})

                def fn(lam=lam, mu=mu, ml=ml, mm=mm):
                    a = inner_product(images[lam], mm, p, grid)
                    b = inner_product(ml, images[mu], p, grid)
                    s1 = inner_product(images[lam], images[lam], p, grid).real * inner_product(mm, mm, p, grid).real
                    s2 = inner_product(images[mu], images[mu], p, grid).real * inner_product(ml, ml, p, grid).real
                    scale = math.sqrt(max(s1, s2))
                    return abs(a - b) / scale, scale

                col.run(f"{_pname(p)} {_lam(lam)} vs {_lam(mu)} M={grid.M}", tol, fn)


def _top_partitions(n, w):
    # every down-set of weight <= w sits inside the down-set of some weight-w partition
    return [lam for lam in partitions_up_to(n, w) if sum(lam) == w] or [(0,) * n]


def check_triangularity(cfg: Config, col: _Collector):
    tol = 1e-8
    for n in _ns(cfg, 3):
        for p in cfg.params_for(n):
            col.use(p)
            for lam in _top_partitions(n, cfg.max_weight):
                for r in range(1, n + 1):

                    def tri(lam=lam, r=r, p=p):
                        A = operator_matrix(r, lam, p)
                        return A.triangularity_residual(), A.scale()

                    def diag(lam=lam, r=r, p=p):
                        A = operator_matrix(r, lam, p)
                        return A.diagonal_residual(p), A.scale()

                    col.run(f"{_pname(p)} lam={_lam(lam)} r={r} triangular", tol, tri)
                    col.run(f"{_pname(p)} lam={_lam(lam)} r={r} eigenvalues", tol, diag)


def check_commutativity(cfg: Config, col: _Collector):
    tol = 1e-8
    for n in _ns(cfg, 3):
        if n < 2:
            continue
        for p in cfg.params_for(n):
            col.use(p)
            for lam in _top_partitions(n, cfg.max_weight):
                for r1, r2 in combinations(range(1, n + 1), 2):

                    def fn(lam=lam, r1=r1, r2=r2, p=p):
                        A = operator_matrix(r1, lam, p).matrix
                        B = operator_matrix(r2, lam, p).matrix
                        scale = np.abs(A).max() * np.abs(B).max()
                        return float(np.abs(A @ B - B @ A).max() / scale), float(scale)

                    col.run(f"{_pname(p)} lam={_lam(lam)} D{r1} D{r2}", tol, fn)


_CHECKS = {
    "orthogonality": check_orthogonality,
    "difference_equations": check_difference_equations,
    "duality": check_duality,
    "pieri": check_pieri,
    "evaluation_formula": check_evaluation_formula,
    "norm_formula": check_norm_formula,
    "gustafson": check_gustafson,
    "n1_hypergeometric": check_n1_hypergeometric,
    "uv_annihilation": check_uv_annihilation,
    "u_chain_equality": check_u_chain_equality,
    "lemma_res_pattern": check_lemma_res_pattern,
    "method_agreement": check_method_agreement,
    "symmetry": check_symmetry,
    "triangularity": check_triangularity,
    "commutativity": check_commutativity,
}

OFF_HYPERPLANE_CHECKS = ("duality", "evaluation_formula", "norm_formula")
QUADRATURE_CHECKS = ("orthogonality", "norm_formula", "gustafson", "method_agreement", "symmetry")


def run_check(check_id: str, config: Config | None = None) -> Report:
    cfg = config or Config()
    if check_id not in _CHECKS:
        raise UnknownCheckError(check_id)
    if check_id in QUADRATURE_CHECKS and any(n > QUADRATURE_MAX_N for n in cfg.ns):
        raise ConfigError(f"{check_id} uses quadrature, which supports n <= {QUADRATURE_MAX_N}")
    if any(n < 1 for n in cfg.ns):
        raise ConfigError("n must be positive")
    experimental = cfg.offhyperplane and check_id in OFF_HYPERPLANE_CHECKS
    if not experimental:
        cfg = replace(cfg, offhyperplane=False)
    t0 = time.time()
    col = _Collector()
    _CHECKS[check_id](cfg, col)
    return col.report(check_id, t0, experimental)


def run_all(config: Config | None = None, checks: Sequence[str] = CHECK_IDS) -> list[Report]:
    cfg = config or Config()
    reports = [run_check(c, replace(cfg, offhyperplane=False)) for c in checks]
    if cfg.offhyperplane:
        reports += [run_check(c, cfg) for c in OFF_HYPERPLANE_CHECKS if c in checks]
    return reports


def overall_passed(reports: Sequence[Report]) -> bool:
    return all(r.passed for r in reports if not r.experimental)
