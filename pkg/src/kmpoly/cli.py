"""Command-line front end: ``compute``, ``verify`` and ``table``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import koornwinder as km
from . import verify
from .params import PARAM_KEYS, InvalidParameterError, params_from_mapping, parse_config
from .partitions import format_partition, parse_partition, partitions_up_to
from .symcore import QuadGrid, grid_for_accuracy

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _add_param_flags(ap: argparse.ArgumentParser):
    ap.add_argument("--config", type=Path, help="key=value parameter file; flags override it")
    ap.add_argument("--n", type=int)
    for key in PARAM_KEYS[1:]:
        ap.add_argument(f"--{key}", type=float)


def _params(args):
    values = {}
    if args.config is not None:
        try:
            values.update(parse_config(args.config.read_text()))
        except OSError as err:
            raise UsageError(f"cannot read config: {err}") from err
    for key in PARAM_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    try:
        return params_from_mapping(values)
    except InvalidParameterError as err:
        raise UsageError(str(err)) from err


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def cmd_compute(args) -> int:
    p = _params(args)
    try:
        lam = parse_partition(args.lam, p.n)
    except ValueError as err:
        raise UsageError(f"bad --lambda: {err}") from err
    grid = QuadGrid(p.n, args.grid) if args.grid else None
    out = {"params": p.as_dict(), "lambda": format_partition(lam)}
    polys = {}
    if args.method in ("op", "both"):
        polys["operator"] = km.build_op(lam, p)
    if args.method in ("gs", "both"):
        polys["gram_schmidt"] = km.build_gs(lam, p, grid)
    out["polynomials"] = {k: v.to_json() for k, v in polys.items()}
    if len(polys) == 2:
        out["method_max_deviation"] = km.coefficient_deviation(polys["operator"], polys["gram_schmidt"])
    out["evaluation_direct"] = km.eval_at_rho_star(lam, p)
    out["evaluation_constant"] = km.evaluation_constant(lam, p)
    out["norm_closed_form"] = km.norm_closed_form(lam, p)
    if args.check_phi43:
        if p.n != 1:
            raise UsageError("--check-phi43 needs --n 1")
        xs = np.linspace(-1.2, 1.2, 9)
        pt = km.normalized(lam, p)
        a, b = pt(xs[:, None]), km.phi43(lam[0], xs, p)
        scale = np.maximum(pt.term_scale(xs[:, None]), km.phi43(lam[0], xs, p, with_scale=True)[1])
        out["phi43_residual"] = float((np.abs(a - b) / scale).max())
    _emit(json.dumps(out, indent=1, sort_keys=True), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed
    if seed is None:
        env = os.environ.get("KM_SEED")
        try:
            seed = int(env) if env is not None else DEFAULT_SEED
        except ValueError as err:
            raise UsageError(f"KM_SEED must be an integer, got {env!r}") from err
    cfg = verify.Config(seed=seed, grid=args.grid, offhyperplane=args.offhyperplane)
    if args.n is not None:
        cfg = replace(cfg, ns=(args.n,))
    if args.max_weight is not None:
        cfg = replace(cfg, max_weight=args.max_weight)
    try:
        if args.check:
            reports = [verify.run_check(args.check, cfg)]
        else:
            reports = verify.run_all(cfg)
    except verify.ConfigError as err:
        raise UsageError(str(err)) from err
    for r in reports:
        print(r.summary())
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        for r in reports:
            name = r.check_id + ("-experimental" if r.experimental else "")
            (args.out / f"{name}.json").write_text(r.to_json() + "\n", encoding="utf-8")
    ok = verify.overall_passed(reports)
    print("ALL PASSED" if ok else "FAILURES PRESENT")
    return EXIT_OK if ok else EXIT_FAIL


TABLE_COLUMNS = (
    "lambda", "eval_direct", "eval_closed", "eval_rel_dev", "norm_quadrature", "norm_closed", "norm_rel_dev",
)


def cmd_table(args) -> int:
    p = _params(args)
    quad = not args.no_quadrature
    if quad and p.n > 3:
        raise UsageError("quadrature columns need n <= 3 (use --no-quadrature)")
    rows = []
    for lam in partitions_up_to(p.n, args.max_weight):
        direct, closed = km.eval_at_rho_star(lam, p), km.evaluation_constant(lam, p)
        row = {"lambda": format_partition(lam), "eval_direct": direct, "eval_closed": closed,
               "eval_rel_dev": abs(direct / closed - 1)}
        nc = km.norm_closed_form(lam, p)
        if quad:
            grid = QuadGrid(p.n, args.grid) if args.grid else grid_for_accuracy(p, 2 * lam[0])
            nq = km.norm_quadrature(lam, p, grid)
            row.update(norm_quadrature=nq, norm_closed=nc, norm_rel_dev=abs(nq / nc - 1))
        else:
            row.update(norm_quadrature=None, norm_closed=nc, norm_rel_dev=None)
        rows.append(row)
    if args.format == "json":
        text = json.dumps(rows, indent=1)
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if v is None else (f"{v:.15g}" if isinstance(v, float) else v)) for k, v in row.items()})
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kmpoly", description="Koornwinder-Macdonald polynomials and identity checks")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="build one polynomial and its constants")
    _add_param_flags(c)
    c.add_argument("--lambda", dest="lam", required=True, help="partition, e.g. 2,1")
    c.add_argument("--method", choices=("op", "gs", "both"), default="op")
    c.add_argument("--check-phi43", action="store_true")
    c.add_argument("--grid", type=int, help="quadrature points per dimension for the gs route")
    c.add_argument("--out", type=Path)
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", help="run identity checks")
    v.add_argument("--check", choices=verify.CHECK_IDS)
    v.add_argument("--n", type=int, help="restrict the sweep to one n")
    v.add_argument("--seed", type=int, help="sample seed (default: $KM_SEED or 0)")
    v.add_argument("--max-weight", type=int)
    v.add_argument("--grid", type=int, help="override quadrature points per dimension")
    v.add_argument("--offhyperplane", action="store_true", help="add experimental off-hyperplane reports")
    v.add_argument("--out", type=Path, help="directory for JSON reports")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("table", help="evaluation and norm table")
    _add_param_flags(t)
    t.add_argument("--max-weight", type=int, default=3)
    t.add_argument("--grid", type=int)
    t.add_argument("--no-quadrature", action="store_true")
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.add_argument("--out", type=Path)
    t.set_defaults(func=cmd_table)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
