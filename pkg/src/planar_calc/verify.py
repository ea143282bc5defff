"""Invariant suites, one per module, driven by a single seeded generator.

Every suite returns a list of :class:`Check` records.  The seed only moves the
random samples; the set of checks and their tolerances are fixed.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import triholo as th
from .calculus import hausdorff, holo_calc, is_star_normal, opnorm
from .errors import InvalidInputError
from .disk import (BoundarySamples, conjugate_harmonic, fourier_split, poisson_eval,
                   random_trig_data)
from .geometry import (Disk, HalfPlane, boundary, cut_halfplane, fill_holes, grid_components,
                       make_disk_union, symmetrize)
from .harmonic import harmonic_calc, superpositive_abs, symbol_from_function
from .realops import isometry_check, real_embed
from .schwarz import alternating_solve, seam_points


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    defect: float
    tol: float

    def to_json(self):
        d = asdict(self)
        d["defect"] = float(d["defect"])
        return d


def _check(name, defect, tol, strict=False):
    defect = float(defect)
    ok = defect < tol if strict else defect <= tol
    return Check(name, bool(ok), defect, float(tol))


# --------------------------------------------------------------------------
# shared samplers


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_normal(rng, n, moduli=None):
    """``U diag(lam) U*`` with ``|lam|`` given (default: uniform in [0, 1])."""
    r = rng.uniform(0, 1, n) if moduli is None else np.broadcast_to(moduli, (n,))
    lam = r * np.exp(2j * np.pi * rng.uniform(0, 1, n))
    U = random_unitary(rng, n)
    return U @ np.diag(lam) @ U.conj().T, U, lam


def random_poly(rng, degree):
    return (rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)) / np.sqrt(2 * (degree + 1))


def polyfun(c):
    return lambda z: np.polynomial.polynomial.polyval(z, c)


def ring_of_disks(count=8, ring=1.2, r=0.5, shift=0j):
    centers = shift + ring * np.exp(2j * np.pi * np.arange(count) / count)
    return make_disk_union([Disk(complex(c), r) for c in centers])


def union_boundary_points(disks, samples=4096):
    """Equispaced points of every circle that are not inside another disk."""
    out = []
    t = np.exp(2j * np.pi * np.arange(samples) / samples)
    for d in disks:
        p = d.center + d.radius * t
        hidden = np.zeros(p.size, bool)
        for e in disks:
            if e is not d:
                hidden |= e.contains_open(p, tol=1e-12 * e.radius)
        out.append(p[~hidden])
    return np.concatenate(out)


def seam_vanishing_data(rng, disks, degree=4, samples=4096):
    """Random smooth real data vanishing at the corner points, with sup 1 on the boundary."""
    seams = seam_points(disks)
    a = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)

    def raw(z):
        z = np.asarray(z, complex)
        v = np.real(np.polynomial.polynomial.polyval(z, a))
        for s in seams:
            v = v * np.abs(z - s)
        return v

    scale = float(np.max(np.abs(raw(union_boundary_points(disks, samples)))))
    return lambda z: raw(z) / scale


# --------------------------------------------------------------------------
# suites


def suite_geometry(rng, trials=None, level=None):
    n = 10_000 if trials is None else max(1, trials) * 500
    ring = ring_of_disks()
    shifted = ring_of_disks(shift=0.3j)
    filled = fill_holes(ring)
    cut = cut_halfplane(filled, HalfPlane(0j, 1 + 0j, "left"))
    x0, x1, y0, y1 = shifted.bbox()
    probes = rng.uniform(x0 - 0.5, x1 + 0.5, n) + 1j * rng.uniform(y0 - 0.5, y1 + 0.5, n)
    sym = symmetrize(shifted)
    out = [
        _check("fill_holes idempotent", np.count_nonzero(fill_holes(filled).contains(probes) != filled.contains(probes)), 0),
        _check("symmetrize idempotent", np.count_nonzero(symmetrize(sym).contains(probes) != sym.contains(probes)), 0),
        _check("set inside its filling", np.count_nonzero(ring.contains(probes) & ~filled.contains(probes)), 0),
        _check("cut inside the set", np.count_nonzero(cut.contains(probes) & ~filled.contains(probes)), 0),
    ]
    worst = 0
    for cset in (ring, filled, cut, sym):
        for c in boundary(cset):
            p, nrm = c.sample(200)
            inside = cset.contains(p - 1e-9 * nrm)
            outside = ~cset.contains(p + 1e-9 * nrm)
            worst += int(np.count_nonzero(~inside) + np.count_nonzero(~outside))
    out.append(_check("boundary within 1e-9 of set and complement", worst, 0))
    n_set, n_holes = grid_components(ring, resolution=512)
    out.append(_check("flood fill sees one hole in the ring", abs(n_set - 1) + abs(n_holes - 1), 0))
    n_set, n_holes = grid_components(filled, resolution=512)
    out.append(_check("flood fill sees no hole after filling", abs(n_set - 1) + n_holes, 0))
    return out


def suite_disk(rng, trials=None, level=None):
    trials = 10 if trials is None else trials
    mv = mp = hil = cr = dbl = 0.0
    for _ in range(trials):
        disk = Disk(complex(*rng.uniform(-1, 1, 2)), float(rng.uniform(0.5, 2)))
        bd = random_trig_data(rng, degree=int(rng.integers(1, 9)), M=1024, disk=disk)
        vmax = float(np.max(np.abs(bd.values)))
        mv = max(mv, abs(poisson_eval(bd, disk.center) - np.mean(bd.values)))
        rr = disk.radius * np.sqrt(rng.uniform(0, 1, 2000))
        rr[:20] = disk.radius * (1 - 10.0 ** rng.uniform(-12, -2, 20))
        z = disk.center + rr * np.exp(2j * np.pi * rng.uniform(0, 1, rr.size))
        mp = max(mp, float(np.max(np.abs(poisson_eval(bd, z)))) - vmax)
        twice = conjugate_harmonic(conjugate_harmonic(bd)).values
        hil = max(hil, float(np.max(np.abs(twice - (-bd.values + np.mean(bd.values))))))
        split = fourier_split(bd)
        w = disk.center + 0.8 * disk.radius * np.sqrt(rng.uniform(0, 1, 50)) * np.exp(2j * np.pi * rng.uniform(0, 1, 50))
        h = 1e-4 * disk.radius
        f = lambda q: np.polynomial.polynomial.polyval((q - disk.center) / disk.radius, split.holo)
        dbar = 0.5 * ((f(w + h) - f(w - h)) / (2 * h) + 1j * (f(w + 1j * h) - f(w - 1j * h)) / (2 * h))
        cr = max(cr, float(np.max(np.abs(dbar))))
        fine = BoundarySamples.from_function(
            lambda q: fourier_split(bd).reconstruct(np.angle(q - disk.center)).real, disk, 2048)
        zi = disk.center + 0.9 * disk.radius * np.exp(2j * np.pi * rng.uniform(0, 1, 20)) * np.sqrt(rng.uniform(0, 1, 20))
        dbl = max(dbl, float(np.max(np.abs(poisson_eval(fine, zi) - poisson_eval(bd, zi)))))
    return [
        _check("mean value at the center", mv, 1e-12),
        _check("maximum principle (excess over max |samples|)", max(mp, 0.0), 1e-12),
        _check("conjugation twice gives -u + mean", hil, 1e-10),
        _check("holomorphic part satisfies Cauchy-Riemann", cr, 1e-6),
        _check("doubling M moves interior values", dbl, 1e-10),
    ]


def suite_schwarz(rng, trials=None, level=None):
    trials = 3 if trials is None else trials
    X1, X2 = Disk(-0.5 + 0j, 1.0), Disk(0.5 + 0j, 1.0)
    union = make_disk_union([X1, X2])
    nmax = 64
    ces = mono = maxp = 0.0
    lin = 0.0
    for _ in range(trials):
        f1 = seam_vanishing_data(rng, [X1, X2])
        f2 = seam_vanishing_data(rng, [X1, X2])
        s1 = alternating_solve(X1, X2, f1, nmax=nmax, tol=0.0)
        fn = float(np.max(np.abs(f1(union_boundary_points([X1, X2], 1024)))))
        for h in s1.history:
            ces = max(ces, h["overlap_discrepancy"] * h["N"] / (2 * fn))
        pair = np.maximum(s1.state.g_norms, s1.state.h_norms)
        mono = max(mono, float(np.max(np.diff(pair), initial=0.0)))
        x0, x1, y0, y1 = union.bbox()
        z = rng.uniform(x0, x1, 4000) + 1j * rng.uniform(y0, y1, 4000)
        z = z[union.contains(z)]
        maxp = max(maxp, float(np.max(np.abs(s1.evaluate(z)))) - fn)
        a, b = rng.standard_normal(2)
        s2 = alternating_solve(X1, X2, f2, nmax=nmax, tol=0.0)
        s12 = alternating_solve(X1, X2, lambda q: a * f1(q) + b * f2(q), nmax=nmax, tol=0.0)
        lin = max(lin, float(np.max(np.abs(s12.evaluate(z[:200]) - a * s1.evaluate(z[:200]) - b * s2.evaluate(z[:200])))))
    return [
        _check("Cesaro overlap discrepancy times N / (2 ||f||)", ces, 1.0),
        _check("pair sup norms non-increasing", max(mono, 0.0), 1e-12),
        _check("maximum principle on the solution", max(maxp, 0.0), 1e-12),
        _check("linearity at probe points", lin, 1e-8),
    ]


def suite_calculus(rng, trials=None, level=None):
    trials = 20 if trials is None else trials
    hom = smap = taylor = contr = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        x = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)
        cf, cg = random_poly(rng, int(rng.integers(0, 9))), random_poly(rng, int(rng.integers(0, 9)))
        fx, gx = holo_calc(x, polyfun(cf)), holo_calc(x, polyfun(cg))
        fgx = holo_calc(x, polyfun(np.polynomial.polynomial.polymul(cf, cg)))
        hom = max(hom, opnorm(fgx - fx @ gx) / max(opnorm(fx) * opnorm(gx), 1.0))
        smap = max(smap, hausdorff(np.linalg.eigvals(fx), polyfun(cf)(np.linalg.eigvals(x))) / max(opnorm(fx), 1.0))
        y = x * rng.uniform(0.1, 2.0) / max(opnorm(x), 1e-300)
        ex = holo_calc(y, np.exp)
        term, acc = np.eye(n, dtype=complex), np.zeros((n, n), complex)
        for k in range(50):
            acc += term
            term = term @ y / (k + 1)
        taylor = max(taylor, float(np.max(np.abs(ex - acc))))
        xn, _, lam = random_normal(rng, n)
        contr = max(contr, opnorm(holo_calc(xn, polyfun(cf))) - float(np.max(np.abs(polyfun(cf)(lam)))))
    return [
        _check("homomorphism defect (relative)", hom, 1e-8),
        _check("spectral mapping Hausdorff distance (relative)", smap, 1e-7),
        _check("exp matches 50-term Taylor series", taylor, 1e-9),
        _check("contractive on normal matrices", max(contr, 0.0), 1e-8),
    ]


def _trig_symbol(rng, degree):
    c = (rng.standard_normal(2 * degree + 1) + 1j * rng.standard_normal(2 * degree + 1)) / (2 * degree + 1)
    k = np.arange(-degree, degree + 1)

    def u(z):
        z = np.asarray(z, complex)
        th_ = np.angle(z)
        return np.exp(1j * np.multiply.outer(th_, k)) @ c
    return u


def suite_harmonic(rng, trials=None, level=None):
    trials = 5 if trials is None else trials
    eig = pos = cons = norm = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        x, U, lam = random_normal(rng, n, moduli=1.0)
        for _ in range(3):
            u = _trig_symbol(rng, int(rng.integers(0, 9)))
            got = harmonic_calc(x, symbol_from_function(u, 1.0, 4096))
            want = U @ np.diag(u(lam)) @ U.conj().T
            eig = max(eig, float(np.linalg.norm(got - want)))
        xi, _, _ = random_normal(rng, n)
        p = random_poly(rng, 4)
        nonneg = lambda z, p=p: np.abs(polyfun(p)(z)) ** 2
        h = harmonic_calc(xi, symbol_from_function(nonneg, 1.0, 4096))
        pos = max(pos, -float(np.min(np.linalg.eigvalsh(0.5 * (h + h.conj().T)))))
        got = harmonic_calc(xi, symbol_from_function(polyfun(p), 1.0, 4096))
        cons = max(cons, float(np.max(np.abs(got - holo_calc(xi, polyfun(p))))))
        c = float(rng.uniform(0.2, 3.0))
        xs = c * x
        norm = max(norm, abs(opnorm(superpositive_abs(xs)) - opnorm(xs)) / opnorm(xs))
    return [
        _check("eigen-oracle Frobenius error", eig, 1e-8),
        _check("non-negative symbol gives PSD (negative eigenvalue size)", max(pos, 0.0), 1e-8),
        _check("holomorphic symbol matches contour calculus", cons, 1e-9),
        _check("superpositive absolute value keeps the norm", norm, 1e-6),
    ]


def suite_real_iso(rng, trials=None, level=None):
    trials = 20 if trials is None else trials
    level = 2 if level is None else level
    iso1 = isok = adj = lin = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 7))
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        iso1 = max(iso1, abs(opnorm(real_embed(x)) - opnorm(x)) / opnorm(x))
        adj = max(adj, float(np.max(np.abs(real_embed(x.conj().T) - real_embed(x).T))))
        a, b = rng.standard_normal(2)
        lin = max(lin, float(np.max(np.abs(real_embed(a * x + b * y) - (a * real_embed(x) + b * real_embed(y))))))
    x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    isok = isometry_check(x, level=level, samples=trials, rng=rng).max_defect
    return [
        _check("level-1 norm defect", iso1, 1e-9),
        _check(f"level-{level} norm defect", isok, 1e-8),
        _check("adjoint embeds as transpose", adj, 0),
        _check("real-linearity", lin, 0),
    ]


def suite_triholo(rng, trials=None, level=None):
    trials = 100 if trials is None else trials
    dims = sum(abs(len(th.homogeneous_basis(m)) - th.nullity_oracle(m)) for m in range(5))
    basis = th.triholo_basis(2)
    closure = lap = 0
    for a in basis:
        for b in basis:
            p = th.triholo_product(a, b)
            closure += th.triholo_check(p).residual != 0
            rep = th.laplacian_report(p)
            lap += not (rep.combination_vanishes and rep.component_identity)
    for a in basis:
        rep = th.laplacian_report(a)
        lap += not (rep.combination_vanishes and rep.component_identity)

    def combo():
        out = th.field()
        for t in basis:
            out = out + t.scaled(Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))))
        return out

    hom = 0.0
    for _ in range(trials):
        a, b = combo(), combo()
        p = th.triholo_product(a, b)
        closure += th.triholo_check(p).residual != 0
        q = tuple(float(v) for v in rng.uniform(-1, 1, 3))
        lhs = th.complex_evaluate(p.to_float(), q)
        rhs = th.complex_evaluate(a.to_float(), q) * th.complex_evaluate(b.to_float(), q)
        hom = max(hom, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return [
        _check("basis dimension matches SVD nullity (degrees 0-4)", dims, 0),
        _check("products of solutions are solutions (failures)", closure, 0),
        _check("Laplacian identities (failures)", lap, 0),
        _check("evaluation is multiplicative", hom, 1e-10),
    ]


SUITES = {
    "geometry": suite_geometry,
    "disk": suite_disk,
    "schwarz": suite_schwarz,
    "calculus": suite_calculus,
    "harmonic": suite_harmonic,
    "real-iso": suite_real_iso,
    "triholo": suite_triholo,
}


def run_suites(names=None, seed=42, trials=None, level=None):
    """Run the named suites (all by default) from one generator seeded with ``seed``."""
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InvalidInputError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    rng = np.random.default_rng(seed)
    out = {}
    for name in names:
        checks = SUITES[name](rng, trials=trials, level=level)
        out[name] = {"checks": [c.to_json() for c in checks], "passed": all(c.passed for c in checks)}
    return out
