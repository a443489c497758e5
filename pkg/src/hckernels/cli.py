"""Command-line front end.

    hckernels cfun --space h2 --lmax 10
    hckernels sph --space h3 --lambda 1.5 --grid 0:5:11
    hckernels kernel --space h3 --multiplier heat:1 --grid 0
    hckernels verify-uniform --space h2 --family "heat:0.5;heat:1;heat:2"
    hckernels verify-pointwise --space h3 --multiplier resolvent:6,1
    hckernels verify-lower --space h2 --kappa 6 --tmax 50

Tables go to ``<out>/<subcommand>.<format>`` when --out is given and to
stdout otherwise; verification commands also print one summary line per
check, ``PASS criterion=<name> ratio=<x>`` or ``FAIL ...``.  Exit status is
0 on success, 1 if a check fails and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import harish_chandra as hc
from . import verify as vf
from .kernel_eval import DivergenceError, MultiplierSpec, kernel_grid
from .root_system import RootDatum, RootSystemError, from_name

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


# -- parsing helpers -----------------------------------------------------------

def parse_space(text: str) -> RootDatum:
    try:
        return from_name(text)
    except (RootSystemError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def parse_lambda(text: str, datum: RootDatum) -> np.ndarray:
    """``1.5``, ``1.5,0.3`` or a multiple of rho such as ``-i*rho`` / ``0.5i*rho``."""
    t = text.replace(" ", "").lower()
    m = re.fullmatch(r"([+-]?[0-9.eE+-]*)(i?)\*?rho", t)
    if m:
        signs = {"": 1.0, "+": 1.0, "-": -1.0}
        coef = signs[m.group(1)] if m.group(1) in signs else float(m.group(1))
        scale = complex(0, coef) if m.group(2) else complex(coef)
        return scale * datum.rho.astype(complex)
    try:
        vals = np.array([complex(v.replace("i", "j")) for v in t.split(",")])
    except ValueError as exc:
        raise InputError(f"cannot parse spectral parameter {text!r}") from exc
    if vals.shape != (datum.rank,):
        raise InputError(f"spectral parameter needs {datum.rank} components")
    return vals


def parse_grid(text: str, datum: RootDatum) -> list:
    """``a:b:n`` (n radii from a to b; rank two along the chamber bisector),
    ``x`` / ``x,y`` single points separated by ``;``, or ``default``."""
    text = text.strip()
    if text == "default":
        return vf.default_grid(datum)
    if ":" in text:
        try:
            a, b, n = text.split(":")
            radii = np.linspace(float(a), float(b), int(n))
        except ValueError:
            raise InputError(f"bad range {text!r}; expected a:b:n") from None
        if datum.rank == 1:
            u = datum.simple_roots[0] / np.linalg.norm(datum.simple_roots[0])
        else:
            w = np.linalg.inv(datum.simple_roots)
            w = w / np.linalg.norm(w, axis=0)
            u = (w[:, 0] + w[:, 1]) / np.linalg.norm(w[:, 0] + w[:, 1])
        return [r * u for r in radii]
    pts = []
    for chunk in text.split(";"):
        try:
            vals = np.array([float(v) for v in chunk.split(",")])
        except ValueError:
            raise InputError(f"bad grid point {chunk!r}") from None
        if vals.shape != (datum.rank,):
            raise InputError(f"grid point {chunk!r} needs {datum.rank} components")
        pts.append(vals)
    return pts


def parse_multiplier(text: str) -> MultiplierSpec:
    try:
        return MultiplierSpec.parse(text)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# -- output ------------------------------------------------------------------

fmt = vf.fmt


def _emit_table(header, rows, args, name):
    if args.format == "json":
        text = json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.{args.format}").write_text(text)
    else:
        sys.stdout.write(text)


def _emit_report(report, args, name):
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(vf.to_json(report))


def _summary(ok: bool, name: str, ratio: float, stream=None) -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion={name} ratio={fmt(ratio)}"
    print(line, file=stream or sys.stdout)
    return line


def _lambda_grid(datum, lmax, n, seed):
    if datum.rank == 1:
        lam = (lmax * np.arange(1, n + 1) / n)[:, None]
    else:
        j = np.arange(1, n + 1)
        golden = math.pi * (3 - math.sqrt(5))
        lam = (lmax * j / n)[:, None] * np.stack([np.cos(golden * j), np.sin(golden * j)], axis=1)
    # nudge points off root hyperplanes
    rng = np.random.default_rng(seed)
    prods = np.abs(lam @ datum.metric @ datum.roots.T)
    bad = np.any(prods < 1e-9, axis=1)
    lam[bad] += 1e-9 * rng.standard_normal((int(bad.sum()), datum.rank))
    return lam


# -- subcommands ---------------------------------------------------------------

def cmd_cfun(args) -> int:
    datum = parse_space(args.space)
    if args.lam is not None:
        lams = parse_lambda(args.lam, datum)[None, :]
    else:
        lams = _lambda_grid(datum, args.lmax, args.n, args.seed).astype(complex)
    header = [f"lambda{i + 1}" for i in range(datum.rank)] + ["re_c", "im_c", "density", "weyl_check"]
    rows = []
    for lam in lams:
        c = hc.c_function(datum, lam).value
        real = not np.any(lam.imag)
        if real:
            dens = hc.plancherel_density(datum, lam.real)
            images = np.array([s @ lam.real for s in datum.weyl_group])
            d_all = hc.plancherel_density(datum, images)
            conj = abs(hc.c_function(datum, -lam.real).value - np.conj(c))
            ok = np.max(np.abs(d_all - dens)) <= 1e-10 * dens and conj <= 1e-10 * abs(c)
            check = "ok" if ok else "mismatch"
        else:
            dens, check = math.nan, "n/a"
        coords = [fmt(x.real) if real else f"{fmt(x.real)}{'+' if x.imag >= 0 else '-'}{fmt(abs(x.imag))}i" for x in lam]
        rows.append(coords + [fmt(c.real), fmt(c.imag), fmt(dens), check])
    _emit_table(header, rows, args, "cfun")
    if args.lam is None:
        ok = all(r[-1] == "ok" for r in rows)
        # keep stdout a clean table when no output directory is given
        stream = sys.stdout if args.out else sys.stderr
        _summary(ok, "weyl_invariance", float(sum(r[-1] == "ok" for r in rows)) / len(rows), stream)
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


def cmd_sph(args) -> int:
    datum = parse_space(args.space)
    lam = parse_lambda(args.lam, datum)
    if np.any(lam.imag):
        raise InputError("sph takes a real spectral parameter")
    grid = parse_grid(args.grid, datum)
    header = [f"H{i + 1}" for i in range(datum.rank)] + ["re_phi", "im_phi", "tail_bound"]
    rows = []
    for H in grid:
        if not np.any(H):
            phi, tail = 1.0 + 0j, 0.0
        else:
            v = hc.spherical_series(datum, lam.real, H, tol=args.tol)
            phi, tail = v.phi, v.tail_bound * math.exp(-v.rho_H)
        rows.append([fmt(h) for h in H] + [fmt(phi.real), fmt(phi.imag), fmt(tail)])
    _emit_table(header, rows, args, "sph")
    return EXIT_OK


def cmd_kernel(args) -> int:
    datum = parse_space(args.space)
    F = parse_multiplier(args.multiplier)
    grid = parse_grid(args.grid, datum)
    samples = kernel_grid(datum, F, grid, tol=args.tol, method=args.method)
    header = [f"H{i + 1}" for i in range(datum.rank)] + [
        "abs_k_L", "abs_k_delta_rho", "quad_error", "re_k_delta_rho", "im_k_delta_rho"]
    rows = []
    for H, s in zip(grid, samples):
        k = s.k_delta_rho
        rows.append([fmt(h) for h in H] + [fmt(abs(s.k_L)), fmt(abs(k)), fmt(s.quad_error), fmt(k.real), fmt(k.imag)])
    _emit_table(header, rows, args, "kernel")
    return EXIT_OK


def cmd_verify_uniform(args) -> int:
    datum = parse_space(args.space)
    family = [parse_multiplier(m) for m in args.family.split(";") if m.strip()]
    cfg = vf.BoundConfig(args.mode, parse_grid(args.grid, datum), args.tol)
    report = vf.verify_uniform(datum, family, cfg)
    _emit_report(report, args, "verify_uniform")
    ok_all = True
    for r in report.reports:
        ok = math.isfinite(r.sup_ratio)
        ok_all &= ok
        _summary(ok, f"finite_ratio[{r.multiplier}]", r.sup_ratio)
    ok = report.spread < args.spread
    ok_all &= ok
    _summary(ok, "family_spread", report.spread)
    return EXIT_OK if ok_all else EXIT_FAIL


def cmd_verify_pointwise(args) -> int:
    datum = parse_space(args.space)
    F = parse_multiplier(args.multiplier)
    grid = parse_grid(args.grid, datum)
    cfg = vf.BoundConfig(args.mode, grid, args.tol)
    report = vf.verify_pointwise(datum, F, cfg=cfg)
    _emit_report(report, args, "verify_pointwise")
    if args.out:
        (Path(args.out) / "verify_pointwise.csv").write_text(vf.table_csv(report, datum.rank))
    kL = report.abs_k_L()
    norms = np.array([np.linalg.norm(H) for H in grid])
    near = norms <= vf.FAR_RANGE[0]
    if report.I_F == 0:
        _summary(True, "pointwise", 0.0)
        return EXIT_OK
    C = vf.fit_constant(kL[near] / report.I_F) if np.any(near) else math.inf
    worst = float(np.max(kL / report.I_F) / C)
    ok = worst <= 1.0
    _summary(ok, "pointwise", worst)
    far = vf.far_mask(grid)
    if np.any(far):
        ok_tail = math.isfinite(report.tail_ratio)
        _summary(ok_tail, "limsup_tail", report.tail_ratio)
        ok &= ok_tail
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_lower(args) -> int:
    datum = parse_space(args.space)
    t_list = [float(t) for t in np.arange(args.tmin, args.tmax + 1e-9, args.tstep)]
    report = vf.verify_lower(datum, args.kappa, t_list, tol=args.tol)
    _emit_report(report, args, "verify_lower")
    ok_nu = abs(report.nu_fft - report.nu) <= 1e-4 * report.nu
    _summary(ok_nu, "nu_fft_agreement", abs(report.nu_fft / report.nu - 1))
    ok_lim = 0.95 <= report.ratio <= 2.1
    _summary(ok_lim, "lower_limit", report.ratio)
    late = [v for t, v in report.grid_sup if t >= 10]
    nd = min(late) / report.nu if late else math.nan
    ok_nd = bool(late) and nd >= 0.5
    _summary(ok_nd, "non_decay", nd)
    return EXIT_OK if (ok_nu and ok_lim and ok_nd) else EXIT_FAIL


# -- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hckernels", description="Spherical functions and multiplier kernels on rank one and two symmetric spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, table=True):
        sp.add_argument("--space", required=True, help="h<n>, ch<n>, qh<n>, a2, a2:<m>, b2, bc2, custom1:ma,m2a, custom2:ms,mm,ml")
        sp.add_argument("--out", default=None, help="output directory (default: tables to stdout)")
        sp.add_argument("--seed", type=int, default=0, help="seed for grid jitter")
        if table:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("cfun", help="c-function and Plancherel density on a lambda grid")
    common(sp)
    sp.add_argument("--lmax", type=float, default=10.0)
    sp.add_argument("--n", type=int, default=200, help="number of grid points")
    sp.add_argument("--lambda", dest="lam", default=None, help="single parameter, e.g. 1.5, 1,0.3 or -i*rho (write --lambda=-i*rho)")
    sp.set_defaults(func=cmd_cfun)

    sp = sub.add_parser("sph", help="spherical function by the Harish-Chandra series")
    common(sp)
    sp.add_argument("--lambda", dest="lam", required=True)
    sp.add_argument("--grid", default="0:5:11")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.set_defaults(func=cmd_sph)

    sp = sub.add_parser("kernel", help="multiplier kernel on a grid of chamber points")
    common(sp)
    sp.add_argument("--multiplier", required=True, help="heat:t, poisson:t, resolvent:s,z, wave:t,kappa")
    sp.add_argument("--grid", default="0")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--method", choices=("auto", "chamber", "shifted"), default="auto")
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("verify-uniform", help="sup-grid ratios |k_L| / I_F across a multiplier family")
    common(sp, table=False)
    sp.add_argument("--family", required=True, help="multipliers separated by ';'")
    sp.add_argument("--grid", default="default")
    sp.add_argument("--mode", choices=vf.EXPONENT_MODES, default="sharp_6d")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--spread", type=float, default=100.0, help="allowed max/min ratio across the family")
    sp.set_defaults(func=cmd_verify_uniform)

    sp = sub.add_parser("verify-pointwise", help="pointwise ratios with a constant fitted on the near grid")
    common(sp, table=False)
    sp.add_argument("--multiplier", required=True)
    sp.add_argument("--grid", default="default")
    sp.add_argument("--mode", choices=vf.EXPONENT_MODES, default="sharp_6d")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_verify_pointwise)

    sp = sub.add_parser("verify-lower", help="rank-one lower bound for the wave family")
    common(sp, table=False)
    sp.add_argument("--kappa", type=float, default=6.0)
    sp.add_argument("--tmin", type=float, default=10.0)
    sp.add_argument("--tmax", type=float, default=50.0)
    sp.add_argument("--tstep", type=float, default=10.0)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.set_defaults(func=cmd_verify_lower)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, RootSystemError, DivergenceError, hc.WallProximityError, hc.IrregularError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
