"""Command-line front end.

Every subcommand writes a JSON run report (sorted keys, wall-clock time kept
under ``timing`` so the rest is reproducible).  Exit codes: 0 success,
1 input error, 2 numerical failure or a failed check.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from contextlib import nullcontext
from pathlib import Path

import numpy as np

from . import io
from . import triholo as th
from .calculus import holo_calc, is_star_normal, opnorm, sqrt_superpositive, superpositive_check
from .disk import generator
from .errors import InvalidInputError, PlanarCalcError
from .harmonic import SUPER_ABS_MODES, ordinary_abs, superpositive_abs
from .realops import isometry_check, real_embed
from .schwarz import dirichlet_solve, fd_laplace_oracle
from .verify import SUITES, Check, _check, run_suites

COMMAND_SUITE = {
    "dirichlet": "schwarz",
    "calculus": "calculus",
    "sqrt": "calculus",
    "superabs": "harmonic",
    "absval": "harmonic",
    "realembed": "real-iso",
    "triholo": "triholo",
}


# builtin data that are restrictions of harmonic polynomials
HARMONIC_GENERATORS = ("const", "cos", "sin", "re_z2")


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors: exit code 1 rather than argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class RunReport:
    def __init__(self, argv):
        self.data = {"command": list(argv), "inputs": {}, "outputs": {}, "checks": []}
        self.start = time.perf_counter()

    def input(self, path):
        self.data["inputs"][str(path)] = io.digest(path)

    def output(self, **kw):
        self.data["outputs"].update(kw)

    def check(self, c: Check):
        self.data["checks"].append(c.to_json())

    @property
    def passed(self):
        ok = all(c["passed"] for c in self.data["checks"])
        suites = self.data.get("verify", {})
        return ok and all(s["passed"] for s in suites.values())

    def finish(self):
        self.data["passed"] = self.passed
        self.data["timing"] = {"wall_seconds": time.perf_counter() - self.start}
        return self.data


def _load(report, path):
    obj = io.read_json(path)
    report.input(path)
    return obj


def _matrix_arg(report, args):
    return io.parse_matrix(_load(report, args.matrix))


def _write_matrix(path, x, provenance):
    obj = io.matrix_to_json(x)
    obj["provenance"] = provenance
    io.write_json(path, obj)


def _inline_or_file(report, value):
    if value.lstrip().startswith(("[", "{")):
        try:
            return json.loads(value)
        except json.JSONDecodeError as err:
            raise InvalidInputError(f"--coeffs: invalid JSON at column {err.colno} ({err.msg})") from None
    return _load(report, value)


# --------------------------------------------------------------------------
# dirichlet


def _grid(domain, n):
    x0, x1, y0, y1 = domain.bbox()
    xs, ys = np.linspace(x0, x1, n), np.linspace(y0, y1, n)
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    return z[domain.contains(z)]


def cmd_dirichlet(args, report):
    domain = io.parse_domain(_load(report, args.domain))
    if args.data:
        f = io.boundary_function(io.parse_boundary(_load(report, args.data)))
    else:
        f = generator(args.gen)
    # sampled boundary sup; sampling misses the true sup by O(step^2)
    fb = max(float(np.max(np.abs(f(c.sample(1 << 16)[0])))) for c in domain.contours)
    if domain.is_disk_union:
        sol = dirichlet_solve(domain, f, nmax=args.nmax, tol=args.tol, M=args.M, lift=args.seam_lift)
        z = _grid(domain, args.grid)
        values = sol.evaluate(z)
        history = sol.history
        method = "poisson" if len(domain.disks) == 1 else "alternating"
        report.output(iterations=sol.iterations_used, overlap_discrepancy=sol.overlap_discrepancy,
                      converged=bool(sol.overlap_discrepancy < args.tol))
        # the iterate norms start at the (lifted) data norm, which bounds the Cesàro gap
        fn = max(history[0]["sup_norm"], np.finfo(float).tiny)
        ratio = max(h["overlap_discrepancy"] * h["N"] / (2 * fn) for h in history)
        report.check(_check("overlap discrepancy within 2 ||f|| / N", ratio, 1.0))
        slack = 1e-3 if args.seam_lift else 1e-6
    else:
        fd = fd_laplace_oracle(domain, f, args.fd_h)
        z, values = fd.points, fd.values[fd.mask]
        history = []
        method = "finite-difference"
        report.output(fd_residual=fd.residual)
        slack = 1e-6
    if args.gen in HARMONIC_GENERATORS:
        err = float(np.max(np.abs(values - f(z))))
        report.check(_check("matches the known harmonic extension on the grid", err, 1e-3 * max(fb, 1.0)))
    excess = float(np.max(np.abs(values))) - fb
    report.check(_check("maximum principle (excess over boundary sup)", max(excess, 0.0), slack * max(fb, 1.0)))
    io.write_grid_csv(args.out, z, values)
    log = {"method": method, "history": history}
    log_path = args.log or str(Path(args.out).with_suffix(".convergence.json"))
    io.write_json(log_path, log)
    report.output(method=method, grid_points=int(z.size), boundary_sup=fb, grid=str(args.out),
                  convergence_log=log_path)
    if args.verify and method != "finite-difference":
        fd = fd_laplace_oracle(domain, f, 1.0 / 64)
        diff = np.abs(sol.evaluate(fd.points) - fd.values[fd.mask])
        report.check(_check("agrees with finite differences at h = 1/64", float(np.max(diff)), 5e-3 * max(fb, 1.0)))


# --------------------------------------------------------------------------
# matrix calculi


def cmd_calculus(args, report):
    x = _matrix_arg(report, args)
    if args.fn == "sqrt":
        y, info = sqrt_superpositive(x, return_info=True)
        prov = {"function": "sqrt", "eps": info["eps"], "steps": len(info["steps"])}
        report.check(_check("result squares back to x (relative)", opnorm(y @ y - x) / max(opnorm(x), 1e-300), 1e-8))
    elif args.fn == "exp":
        y, info = holo_calc(x, np.exp, return_info=True)
        prov = {"function": "exp", **info}
    else:
        if args.coeffs is None:
            raise InvalidInputError("--fn poly needs --coeffs")
        c = io.parse_coeffs(_inline_or_file(report, args.coeffs))
        y, info = holo_calc(x, lambda z: np.polynomial.polynomial.polyval(z, c), return_info=True)
        direct = np.zeros_like(x)
        for a in c[::-1]:
            direct = direct @ x + a * np.eye(x.shape[0])
        report.check(_check("contour result matches Horner evaluation (relative)",
                            opnorm(y - direct) / max(opnorm(direct), 1.0), 1e-8))
        prov = {"function": "poly", "coeffs": [[v.real, v.imag] for v in c], **info}
    _write_matrix(args.out, y, prov)
    report.output(result=str(args.out), norm=opnorm(y))


def cmd_sqrt(args, report):
    x = _matrix_arg(report, args)
    y, info = sqrt_superpositive(x, return_info=True)
    prov = {"symbol": "sqrt", "radius": opnorm(x), "modes": None,
            "truncation": {"eps": info["eps"], "steps": info["steps"]}}
    _write_matrix(args.out, y, prov)
    sq = opnorm(y @ y - x)
    report.check(_check("||y^2 - x||", sq, 1e-10 * max(opnorm(x), 1.0)))
    # superpositivity of the root is reported, not required
    report.output(result=str(args.out), root_superpositive=superpositive_check(y), squaring_defect=sq)


def cmd_superabs(args, report):
    x = _matrix_arg(report, args)
    y, info = superpositive_abs(x, radius=args.radius, M=args.modes, return_info=True)
    _write_matrix(args.out, y, info)
    moduli = np.abs(np.linalg.eigvals(x))
    on_circle = np.ptp(moduli) <= 1e-9 * max(opnorm(x), 1e-300)
    if is_star_normal(x).normal and on_circle and args.radius is None:
        report.check(_check("norm identity |(||abs_s x|| - ||x||)|", abs(opnorm(y) - opnorm(x)), 1e-6 * max(opnorm(x), 1.0)))
    report.output(result=str(args.out), norm=opnorm(y), input_norm=opnorm(x))


def cmd_absval(args, report):
    x = _matrix_arg(report, args)
    y, info = ordinary_abs(x, radius=args.radius, return_info=True)
    _write_matrix(args.out, y, info)
    report.output(result=str(args.out), norm=opnorm(y), input_norm=opnorm(x))


def cmd_realembed(args, report):
    x = _matrix_arg(report, args)
    e = real_embed(x)
    io.write_json(args.out, io.matrix_to_json(e))
    nx = opnorm(x)
    report.check(_check("relative norm defect", abs(opnorm(e) - nx) / nx if nx else opnorm(e), 1e-9))
    if args.level > 1:
        rep = isometry_check(x, level=args.level, samples=args.trials, rng=args.rng)
        report.check(_check(f"level-{args.level} relative norm defect", rep.max_defect, 1e-8))
    report.output(result=str(args.out), size=int(e.shape[0]))


def cmd_triholo(args, report):
    if args.action == "basis":
        basis = th.triholo_basis(args.degree, exact=not args.float)
        obj = {"degree": args.degree, "fields": [th.field_to_json(t) for t in basis]}
        if args.out:
            io.write_json(args.out, obj)
        dims = [len(th.homogeneous_basis(m)) for m in range(args.degree + 1)]
        oracle = [th.nullity_oracle(m) for m in range(args.degree + 1)]
        report.check(_check("dimensions match SVD nullity", sum(abs(a - b) for a, b in zip(dims, oracle)), 0))
        report.output(count=len(basis), per_degree=dims, result=args.out)
    elif args.action == "check":
        t = th.field_from_json(_load(report, args.field))
        rep = th.triholo_check(t)
        tol = 0.0 if t.exact else th.FLOAT_TOL
        report.check(_check("first-order system residual", rep.residual, tol))
        report.output(residual=float(rep.residual), exact=t.exact)
        if rep.residual <= tol:
            lap = th.laplacian_report(t)
            report.check(_check("Laplacian of the combination vanishes", 0 if lap.combination_vanishes else 1, 0))
            report.check(_check("Laplacians satisfy df = dh = -dg", 0 if lap.component_identity else 1, 0))
    else:
        a = th.field_from_json(_load(report, args.a))
        b = th.field_from_json(_load(report, args.b))
        p = th.triholo_product(a, b)
        obj = th.field_to_json(p)
        if args.out:
            io.write_json(args.out, obj)
        else:
            report.output(product=obj)
        if a.valid and b.valid:
            tol = 0.0 if p.exact else th.FLOAT_TOL
            report.check(_check("product satisfies the first-order system", th.triholo_check(p).residual, tol))
        report.output(result=args.out, factors_valid=bool(a.valid and b.valid))


def cmd_verify(args, report):
    names = list(args.only or [])
    if args.suite:
        names.append(args.suite)
    report.data["verify"] = run_suites(names or None, seed=args.seed, trials=args.trials, level=args.level)
    report.output(seed=args.seed, suites=sorted(report.data["verify"]))


COMMANDS = {
    "dirichlet": cmd_dirichlet,
    "calculus": cmd_calculus,
    "sqrt": cmd_sqrt,
    "superabs": cmd_superabs,
    "absval": cmd_absval,
    "realembed": cmd_realembed,
    "triholo": cmd_triholo,
    "verify": cmd_verify,
}


# --------------------------------------------------------------------------
# argument parsing


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="seed for every random sample (default 42)")
    common.add_argument("--report", help="write the run report here instead of stdout")
    common.add_argument("--verify", action="store_true", help="also run this module's invariant suite")

    p = _Parser(prog="planar-calc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dirichlet", parents=[common], help="harmonic extension into a planar domain")
    d.add_argument("--domain", required=True)
    src = d.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="boundary data file")
    src.add_argument("--gen", help="builtin data: const, cos, sin, abs_z, super_abs, re_z2")
    d.add_argument("--out", required=True, help="grid CSV")
    d.add_argument("--log", help="convergence log JSON (default: next to --out)")
    d.add_argument("--tol", type=float, default=1e-6)
    d.add_argument("--nmax", type=int, default=4096)
    d.add_argument("--M", type=int, default=1024, help="boundary nodes per circle")
    d.add_argument("--grid", type=int, default=64, help="grid points per axis")
    d.add_argument("--fd-h", type=float, default=1.0 / 128, help="step for cut or filled domains")
    d.add_argument("--seam-lift", action="store_true",
                   help="subtract a harmonic polynomial so the data vanishes at boundary corners")

    c = sub.add_parser("calculus", parents=[common], help="holomorphic function of a matrix")
    c.add_argument("--matrix", required=True)
    c.add_argument("--fn", choices=["sqrt", "exp", "poly"], required=True)
    c.add_argument("--coeffs", help="JSON list (inline or file), lowest degree first")
    c.add_argument("--out", required=True)

    for name, helptext in (("sqrt", "square root of a superpositive matrix"),
                           ("superabs", "superpositive absolute value"),
                           ("absval", "harmonic calculus of |z|")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--matrix", required=True)
        s.add_argument("--out", required=True)
        if name != "sqrt":
            s.add_argument("--radius", type=float)
        if name == "superabs":
            s.add_argument("--modes", type=int, default=SUPER_ABS_MODES)

    r = sub.add_parser("realembed", parents=[common], help="real block embedding of a complex matrix")
    r.add_argument("--matrix", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--level", type=int, default=1)
    r.add_argument("--trials", type=int, default=20)

    t = sub.add_parser("triholo", parents=[common], help="triholomorphic polynomial fields")
    tsub = t.add_subparsers(dest="action", required=True)
    tb = tsub.add_parser("basis", parents=[common])
    tb.add_argument("--degree", type=int, required=True)
    tb.add_argument("--out")
    tb.add_argument("--float", action="store_true", help="floating coefficients")
    tc = tsub.add_parser("check", parents=[common])
    tc.add_argument("--field", required=True)
    tp = tsub.add_parser("product", parents=[common])
    tp.add_argument("--a", required=True)
    tp.add_argument("--b", required=True)
    tp.add_argument("--out")

    v = sub.add_parser("verify", parents=[common], help="run invariant suites")
    v.add_argument("suite", nargs="?", choices=sorted(SUITES))
    v.add_argument("--only", action="append", choices=sorted(SUITES))
    v.add_argument("--trials", type=int)
    v.add_argument("--level", type=int)
    return p


def _thread_limit():
    n = os.environ.get("PLANAR_CALC_THREADS")
    if not n:
        return nullcontext()
    try:
        n = int(n)
    except ValueError:
        raise InvalidInputError(f"PLANAR_CALC_THREADS must be an integer, got {n!r}") from None
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=max(n, 1))


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.rng = np.random.default_rng(args.seed)
    report = RunReport(argv)
    try:
        with _thread_limit():
            COMMANDS[args.command](args, report)
            suite = COMMAND_SUITE.get(args.command)
            if args.verify and suite:
                report.data["verify"] = run_suites([suite], seed=args.seed)
    except PlanarCalcError as err:
        print(f"planar-calc: error: {err}", file=sys.stderr)
        return err.exit_code
    text = io.dumps(report.finish())
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 2


if __name__ == "__main__":
    sys.exit(main())
