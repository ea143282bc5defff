"""Dirichlet problems on disk unions by Cesàro-averaged alternating extension.

Two closed pieces ``X1`` and ``X2`` overlap in a lens.  Each carries boundary
nodes; on the part of its boundary lying outside the other piece the data is
the prescribed ``f``, on the part inside the other piece (the interface) the
data is taken from the other piece's current harmonic extension.  Both pieces
are updated simultaneously from the previous pair, starting from the trivial
extension (zero on the interfaces), and the returned solution is the running
mean of the iterates rather than the last one.

Because every extension operator here is a convex combination of node values,
the iterates stay bounded by ``max|f|`` and the mismatch of the two means on
the interface telescopes to ``|A (h_0 - h_N)| / N <= 2 max|f| / N``.

A piece is either a single disk (Poisson extension) or, recursively, a union
solved the same way, which lets a chain of overlapping disks be handled one
disk at a time.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import LinearOperator, spsolve

from .disk import poisson_weights
from .errors import (DecompositionError, DomainError, InvalidInputError, ResolutionError,
                     SeamConditionError)
from .geometry import CompactSet, Disk, TWO_PI, circle_circle, make_disk_union

SEAM_TOL = 1e-9


# --------------------------------------------------------------------------
# pieces


class DiskPiece:
    """A closed disk with ``M`` equispaced boundary nodes."""

    def __init__(self, disk: Disk, M: int = 1024):
        self.disk = disk
        self.M = M
        self.disks = (disk,)
        self.nodes = disk.center + disk.radius * np.exp(1j * TWO_PI * np.arange(M) / M)

    def contains(self, z):
        return self.disk.contains(z, tol=1e-12 * self.disk.radius)

    def contains_open(self, z):
        return self.disk.contains_open(z, tol=1e-12 * self.disk.radius)

    def operator(self, pts):
        return poisson_weights(self.disk, self.M, pts, closed=True)


class UnionPiece:
    """``left ∪ right`` with ``right`` a disk; data lives on the union's outer nodes."""

    def __init__(self, left, right: DiskPiece, nmax: int = 512, tol: float = 1e-6):
        if not np.any(left.contains_open(right.nodes)) or not np.any(right.contains_open(left.nodes)):
            raise DecompositionError("pieces do not overlap in a set with interior")
        self.left, self.right = left, right
        self.disks = left.disks + right.disks
        self.nmax, self.tol = nmax, tol
        self.int1 = right.contains_open(left.nodes)
        self.int2 = left.contains_open(right.nodes)
        self.nodes = np.concatenate([left.nodes[~self.int1], right.nodes[~self.int2]])
        self.n_left_outer = int(np.count_nonzero(~self.int1))
        self._a12 = right.operator(left.nodes[self.int1])
        self._xmap = None

    def contains(self, z):
        return self.left.contains(z) | self.right.contains(z)

    def contains_open(self, z):
        return self.left.contains_open(z) | self.right.contains_open(z)

    def split_data(self, d):
        return d[: self.n_left_outer], d[self.n_left_outer:]

    def iterate(self, data, probes=None, nmax=None, tol=None, record=False):
        f1, f2 = self.split_data(data)
        return _alternate(self, f1, f2, nmax or self.nmax, self.tol if tol is None else tol,
                          probes, record)

    def interface_map(self):
        """Matrix taking outer-node data to the converged interface values.

        The exchange is the affine map ``x -> T x + c`` on the interface values
        (left nodes inside the right disk, then right nodes inside the left
        piece).  Every row of ``T`` loses some weight to the data nodes, so its
        spectral radius is below one and the Cesàro means tend to the fixed
        point of ``(I - T) x = c``, which is solved here once per piece.
        """
        if self._xmap is None:
            n1, n2, nl = int(np.count_nonzero(self.int1)), int(np.count_nonzero(self.int2)), self.n_left_outer
            A = self._a12
            Lr = _dense(self.left.operator(self.right.nodes[self.int2]), self.left.nodes.size)
            S = np.eye(n1 + n2)
            S[:n1, n1:] = -A[:, self.int2]
            S[n1:, :n1] = -Lr[:, self.int1]
            rhs = np.zeros((n1 + n2, self.nodes.size))
            rhs[:n1, nl:] = A[:, ~self.int2]
            rhs[n1:, :nl] = Lr[:, ~self.int1]
            self._xmap = np.linalg.solve(S, rhs)
        return self._xmap

    def node_values(self, D):
        """Left and right node values of the converged solution for data ``D``."""
        X = self.interface_map()
        D = np.asarray(D)
        n1, nl = int(np.count_nonzero(self.int1)), self.n_left_outer
        I = X @ D
        G = np.zeros((self.left.nodes.size,) + D.shape[1:], np.result_type(D, float))
        H = np.zeros((self.right.nodes.size,) + D.shape[1:], G.dtype)
        G[~self.int1], G[self.int1] = D[:nl], I[:n1]
        H[~self.int2], H[self.int2] = D[nl:], I[n1:]
        return G, H

    def operator(self, pts):
        pts = np.atleast_1d(np.asarray(pts, complex))

        def matmat(D):
            return _union_values(self, *self.node_values(D), pts)

        return LinearOperator((pts.size, self.nodes.size), matvec=matmat, matmat=matmat, dtype=float)


def _dense(op, n):
    return op if isinstance(op, np.ndarray) else op @ np.eye(n)


def _apply(op, X):
    return op @ X


def _union_values(piece: UnionPiece, G, H, pts):
    """Solution from node data: g on the left, h on the right, their mean on the lens."""
    pts = np.atleast_1d(np.asarray(pts, complex))
    tail = G.shape[1:]
    out = np.zeros((pts.size,) + tail, np.result_type(G, H))
    in1 = piece.left.contains(pts)
    in2 = piece.right.contains(pts)
    lens = piece.left.contains_open(pts) & piece.right.contains_open(pts)
    only1 = in1 & ~lens
    only2 = in2 & ~in1
    if np.any(~(in1 | in2)):
        raise DomainError("evaluation point outside the domain")
    if np.any(only1):
        out[only1] = _apply(piece.left.operator(pts[only1]), G)
    if np.any(only2):
        out[only2] = _apply(piece.right.operator(pts[only2]), H)
    if np.any(lens):
        g = _apply(piece.left.operator(pts[lens]), G)
        h = _apply(piece.right.operator(pts[lens]), H)
        out[lens] = 0.5 * (g + h)
    return out


# --------------------------------------------------------------------------
# the iteration


@dataclass
class AlternatingState:
    """Cesàro means of the node data and per-iteration diagnostics.

    ``g_seq``/``h_seq`` are kept only when the solve was run with
    ``record=True``.
    """

    cesaro_g: np.ndarray
    cesaro_h: np.ndarray
    iterations: int
    discrepancy: float
    history: list = field(default_factory=list)
    g_norms: list = field(default_factory=list)
    h_norms: list = field(default_factory=list)
    g_seq: list = field(default_factory=list)
    h_seq: list = field(default_factory=list)


def _alternate(piece: UnionPiece, f1, f2, nmax, tol, probes=None, record=False):
    left, right = piece.left, piece.right
    int1, int2 = piece.int1, piece.int2
    squeeze = np.ndim(f1) == 1
    f1 = np.asarray(f1).reshape(len(f1), -1)
    f2 = np.asarray(f2).reshape(len(f2), -1)
    dtype = np.result_type(f1, f2, float)
    cols = f1.shape[1]

    G0 = np.zeros((left.nodes.size, cols), dtype)
    H0 = np.zeros((right.nodes.size, cols), dtype)
    G0[~int1] = f1
    H0[~int2] = f2
    probes = np.empty(0, complex) if probes is None else np.asarray(probes, complex)
    n2 = int(np.count_nonzero(int2))
    # one left-operator application yields both the interface data for the
    # right piece and the left solution at the lens probes
    L = _dense(left.operator(np.concatenate([right.nodes[int2], probes])), left.nodes.size)
    R = right.operator(probes) if probes.size else None
    A = piece._a12

    G, H = G0, H0
    a, b = _apply(A, H), _apply(L, G)
    SG = np.zeros_like(G0)
    SH = np.zeros_like(H0)
    Sa = np.zeros_like(a)
    Sb = np.zeros_like(b)
    Sc = np.zeros((probes.size, cols), dtype)
    state = AlternatingState(G0, H0, 0, math.inf)
    for k in range(1, nmax + 1):
        G = G0.copy()
        H = H0.copy()
        G[int1] = a
        H[int2] = b[:n2]
        a, b = _apply(A, H), _apply(L, G)
        SG += G
        SH += H
        Sa += a
        Sb += b
        if R is not None:
            Sc += R @ H
        disc = 0.0
        if a.size:
            disc = max(disc, float(np.max(np.abs(SG[int1] - Sa))) / k)
        if n2:
            disc = max(disc, float(np.max(np.abs(SH[int2] - Sb[:n2]))) / k)
        if probes.size:
            disc = max(disc, float(np.max(np.abs(Sb[n2:] - Sc))) / k)
        gn, hn = float(np.max(np.abs(G))), float(np.max(np.abs(H)))
        state.g_norms.append(gn)
        state.h_norms.append(hn)
        state.history.append({"N": k, "overlap_discrepancy": disc, "sup_norm": max(gn, hn)})
        if record:
            state.g_seq.append(G[:, 0] if squeeze else G)
            state.h_seq.append(H[:, 0] if squeeze else H)
        state.iterations, state.discrepancy = k, disc
        if disc < tol:
            break
    N = state.iterations
    state.cesaro_g = SG[:, 0] / N if squeeze else SG / N
    state.cesaro_h = SH[:, 0] / N if squeeze else SH / N
    return state


def lens_probes(left, right: Disk, count=64):
    """Deterministic points in the open overlap of ``left`` and the disk ``right``."""
    n = 4 * int(math.ceil(math.sqrt(count))) + 8
    xs = np.linspace(right.center.real - right.radius, right.center.real + right.radius, n)
    ys = np.linspace(right.center.imag - right.radius, right.center.imag + right.radius, n)
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    keep = right.contains_open(z, tol=1e-3 * right.radius) & left.contains_open(z)
    z = z[keep]
    if z.size > count:
        z = z[np.linspace(0, z.size - 1, count).astype(int)]
    return z


# --------------------------------------------------------------------------
# solutions


@dataclass
class HarmonicSolution:
    """Harmonic extension on ``domain``; ``evaluate`` accepts arrays of points."""

    domain: CompactSet
    evaluator: object
    boundary_trace: list
    iterations_used: int
    overlap_discrepancy: float
    history: list = field(default_factory=list)
    state: object = None

    def evaluate(self, z):
        z = np.asarray(z, complex)
        out = self.evaluator(np.atleast_1d(z).ravel())
        return out.reshape(z.shape) if z.ndim else out[0]

    __call__ = evaluate


def seam_points(disks, tol=1e-12):
    """Corner points of the union boundary, where two circles meet outside every disk."""
    pts = []
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            a, b = disks[i], disks[j]
            pts.extend(circle_circle(a.center, a.radius, b.center, b.radius))
    pts = np.asarray(pts, complex)
    if pts.size == 0:
        return pts
    inside = np.zeros(pts.size, bool)
    for d in disks:
        inside |= d.contains_open(pts, tol=tol * d.radius)
    return pts[~inside]


def harmonic_lift(points, values):
    """Minimum-norm harmonic polynomial matching ``values`` at ``points``.

    Basis ``1, Re w^n, Im w^n`` with ``w`` the points re-centered and scaled;
    degree grows until the interpolation conditions are met.
    """
    points = np.asarray(points, complex)
    values = np.asarray(values)
    if points.size == 0:
        return lambda z: np.zeros(np.shape(z))
    c = points.mean()
    s = max(float(np.max(np.abs(points - c))), 1e-300)
    deg = max(1, (points.size + 1) // 2)

    def basis(z):
        w = (np.asarray(z, complex) - c) / s
        cols = [np.ones(w.shape)]
        for n in range(1, deg + 1):
            p = w ** n
            cols += [p.real, p.imag]
        return np.stack(cols, axis=-1)

    B = basis(points)
    coef = np.linalg.pinv(B) @ values
    return lambda z: basis(z) @ coef


def _disk_components(disks):
    """Group disks into overlap components, BFS-ordered, contained disks dropped."""
    disks = list(disks)
    keep = []
    for i, d in enumerate(disks):
        covered = any(
            j != i and abs(d.center - e.center) + d.radius <= e.radius + 1e-12 * e.radius
            and (abs(d.center - e.center) + d.radius < e.radius - 1e-12 or j < i or d.radius < e.radius)
            for j, e in enumerate(disks))
        if not covered:
            keep.append(d)
    n = len(keep)
    adj = [[j for j in range(n) if j != i
            and abs(keep[i].center - keep[j].center) < keep[i].radius + keep[j].radius - 1e-12]
           for i in range(n)]
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        order, queue = [], deque([s])
        seen[s] = True
        while queue:
            i = queue.popleft()
            order.append(keep[i])
            for j in adj[i]:
                if not seen[j]:
                    seen[j] = True
                    queue.append(j)
        comps.append(order)
    return comps


def _build_piece(disks, M, tol):
    piece = DiskPiece(disks[0], M)
    for d in disks[1:]:
        piece = UnionPiece(piece, DiskPiece(d, M), tol=tol)
    return piece


def _check_seams(disks, f, lift):
    seams = seam_points(disks)
    if seams.size == 0:
        return None
    vals = np.asarray(f(seams))
    worst = float(np.max(np.abs(vals)))
    if worst <= SEAM_TOL:
        return None
    if not lift:
        raise SeamConditionError(
            f"boundary data is {worst:.3e} at a point where the piece boundaries meet; "
            "it must vanish there (or request the harmonic lift)")
    return harmonic_lift(seams, vals)


def alternating_solve(X1, X2: Disk, f, nmax: int = 4096, tol: float = 1e-6, M: int = 1024,
                      lift: bool = False, probes: int = 64, record: bool = False) -> HarmonicSolution:
    """Solve the Dirichlet problem on ``X1 ∪ X2`` by the alternating exchange.

    Parameters
    ----------
    X1 : Disk, sequence of Disk, or CompactSet
        First piece; a disk union is itself solved recursively.
    X2 : Disk
    f : callable
        Boundary data as a vectorized function of the boundary point.  It must
        vanish where the two boundaries meet unless ``lift`` is set, in which
        case a harmonic polynomial matching it there is subtracted first and
        added back to the solution.
    nmax, tol
        Stop once the Cesàro means disagree by less than ``tol`` on the
        overlap, or after ``nmax`` rounds.
    record
        Keep every iterate's node data in the returned state.
    """
    if isinstance(X1, Disk):
        disks1 = [X1]
    elif isinstance(X1, CompactSet):
        if not X1.is_disk_union:
            raise InvalidInputError("alternating_solve needs a plain disk union for X1")
        disks1 = list(X1.disks)
    else:
        disks1 = list(X1)
    if not isinstance(X2, Disk):
        raise InvalidInputError("X2 must be a disk")
    comps = _disk_components(disks1)
    if len(comps) != 1:
        raise DecompositionError("X1 must be connected")
    disks1 = comps[0]
    left = _build_piece(disks1, M, tol)
    right = DiskPiece(X2, M)
    piece = UnionPiece(left, right, nmax=nmax, tol=tol)
    domain = make_disk_union(disks1 + [X2])
    L = _check_seams(disks1 + [X2], f, lift)
    g = f if L is None else (lambda z: f(z) - L(z))
    return _solve_union(piece, domain, g, L, nmax, tol, probes, record)


def _solve_union(piece, domain, f, L, nmax, tol, probes, record):
    data = np.asarray(f(piece.nodes))
    pr = lens_probes(piece.left, piece.right.disk, probes) if probes else None
    state = piece.iterate(data, probes=pr, nmax=nmax, tol=tol, record=record)

    def evaluator(z):
        u = _union_values(piece, state.cesaro_g, state.cesaro_h, z)
        return u if L is None else u + L(z)

    traces = [("left", piece.left.nodes, state.cesaro_g), ("right", piece.right.nodes, state.cesaro_h)]
    if L is not None:
        traces = [(n, p, v + L(p)) for n, p, v in traces]
    return HarmonicSolution(domain, evaluator, traces, state.iterations, state.discrepancy,
                            state.history, state)


def _disk_solution(disk, f, M):
    from .disk import BoundarySamples, poisson_eval

    bd = BoundarySamples.from_function(f, disk, M)
    return HarmonicSolution(make_disk_union([disk]), lambda z: poisson_eval(bd, z, closed=True),
                            [bd], 1, 0.0, [{"N": 1, "overlap_discrepancy": 0.0,
                                            "sup_norm": float(np.max(np.abs(bd.values)))}])


def dirichlet_solve(domain: CompactSet, f, nmax: int = 4096, tol: float = 1e-6, M: int = 1024,
                    lift: bool = False) -> HarmonicSolution:
    """Harmonic extension of ``f`` into a disk union.

    Each overlap component is solved on its own: a single disk by the Poisson
    integral, several disks by nesting the alternating solver in breadth-first
    order so every new disk overlaps what came before.
    """
    if not domain.is_disk_union:
        raise InvalidInputError("dirichlet_solve handles plain disk unions; use fd_laplace_oracle for cut or filled sets")
    parts = []
    for comp in _disk_components(domain.disks):
        if len(comp) == 1:
            parts.append((comp, _disk_solution(comp[0], f, M)))
        else:
            X1 = comp[:-1]
            parts.append((comp, alternating_solve(X1, comp[-1], f, nmax=nmax, tol=tol, M=M,
                                                  lift=lift)))
    if len(parts) == 1:
        sol = parts[0][1]
        sol.domain = domain
        return sol

    def evaluator(z):
        out = np.full(z.shape, np.nan, complex)
        done = np.zeros(z.shape, bool)
        for comp, sol in parts:
            m = ~done & make_disk_union(comp).contains(z)
            if np.any(m):
                out[m] = sol.evaluate(z[m])
                done |= m
        if not np.all(done):
            raise DomainError("evaluation point outside the domain")
        return out.real if np.all(out.imag == 0) else out

    return HarmonicSolution(domain, evaluator, [t for _, s in parts for t in s.boundary_trace],
                            max(s.iterations_used for _, s in parts),
                            max(s.overlap_discrepancy for _, s in parts),
                            [h for _, s in parts for h in s.history])


# --------------------------------------------------------------------------
# symmetrization


def _is_symmetric(disks, tol=1e-12):
    return all(any(abs(np.conj(d.center) - e.center) <= tol * d.radius and abs(d.radius - e.radius) <= tol * d.radius
                   for e in disks) for d in disks)


def symmetrization_solve(X: CompactSet, f, nmax: int = 4096, tol: float = 1e-6, M: int = 1024) -> HarmonicSolution:
    """Dirichlet solve on a disk union symmetric under ``z -> conj(z)``.

    ``f`` is split into ``f_s = (f + f∘conj)/2`` and ``f_a = f - f_s``.  For
    each part with parity ``sigma`` (+1, -1) one solves on the upper piece
    ``P`` (disks with centers in the closed upper half-plane).  Boundary nodes
    of ``P`` inside ``X`` receive ``sigma * u(conj(node))`` from the previous
    iterate, the updates are Cesàro averaged, and on the overlap of ``P`` with
    its mirror image the value is projected to ``(u(z) + sigma u(conj z))/2``.
    """
    if not X.is_disk_union:
        raise InvalidInputError("symmetrization_solve handles plain disk unions")
    comps = _disk_components(X.disks)
    disks = [d for c in comps for d in c]
    if not _is_symmetric(disks):
        raise DecompositionError("domain is not symmetric under reflection at the real axis")
    upper = [d for d in disks if d.center.imag >= 0]
    ucomps = _disk_components(upper)
    if len(ucomps) != 1:
        raise DecompositionError("upper half of the domain must be connected")
    P = _build_piece(ucomps[0], M, tol)
    Xopen = lambda z: np.any([d.contains_open(z, tol=1e-12 * d.radius) for d in disks], axis=0)
    inner = Xopen(P.nodes)
    mirror = P.operator(np.conj(P.nodes[inner])) if np.any(inner) else None

    def fs(z):
        return 0.5 * (np.asarray(f(z)) + np.asarray(f(np.conj(z))))

    def fa(z):
        return np.asarray(f(z)) - fs(z)

    runs = []
    for sigma, part in ((1.0, fs), (-1.0, fa)):
        D0 = np.asarray(part(P.nodes), dtype=np.result_type(float, np.asarray(f(P.nodes[:1]))))
        D0 = D0.copy()
        D0[inner] = 0.0
        D, S = D0, np.zeros_like(D0)
        Sb = np.zeros(int(np.count_nonzero(inner)), D0.dtype)
        history, disc, k = [], 0.0, 0
        b = _apply(mirror, D) * sigma if mirror is not None else None
        for k in range(1, nmax + 1):
            D = D0.copy()
            if mirror is not None:
                D[inner] = b
                b = sigma * _apply(mirror, D)
                Sb += b
            S += D
            disc = float(np.max(np.abs(S[inner] - Sb))) / k if mirror is not None else 0.0
            history.append({"N": k, "overlap_discrepancy": disc, "sup_norm": float(np.max(np.abs(D)))})
            if disc < tol:
                break
        runs.append((sigma, S / k, k, disc, history))

    def evaluator(z):
        out = np.zeros(z.shape, complex)
        inP = P.contains(z)
        inM = P.contains(np.conj(z))
        if np.any(~(inP | inM)):
            raise DomainError("evaluation point outside the domain")
        both = P.contains_open(z) & P.contains_open(np.conj(z))
        onlyP = inP & ~both
        onlyM = inM & ~inP
        for sigma, Dbar, *_ in runs:
            if np.any(onlyP):
                out[onlyP] += _apply(P.operator(z[onlyP]), Dbar)
            if np.any(onlyM):
                out[onlyM] += sigma * _apply(P.operator(np.conj(z[onlyM])), Dbar)
            if np.any(both):
                u = _apply(P.operator(z[both]), Dbar)
                v = _apply(P.operator(np.conj(z[both])), Dbar)
                out[both] += 0.5 * (u + sigma * v)
        return out.real if not np.iscomplexobj(np.asarray(f(z[:1]))) else out

    hist = [dict(h, parity=("even" if s > 0 else "odd")) for s, *_, hh in runs for h in hh]
    return HarmonicSolution(X, evaluator, [("upper", P.nodes, runs[0][1] + runs[1][1])],
                            max(r[2] for r in runs), max(r[3] for r in runs), hist)


# --------------------------------------------------------------------------
# finite-difference oracle


@dataclass
class FDGrid:
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray  # NaN off the interior nodes
    mask: np.ndarray
    residual: float

    @property
    def points(self):
        return (self.x[None, :] + 1j * self.y[:, None])[self.mask]


def _crossing(contains, a, b, iters=60):
    """Bisection for the boundary point on segment ``a -> b`` (a inside, b outside)."""
    lo = np.zeros(a.shape)
    hi = np.ones(a.shape)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        inside = contains(a + mid * (b - a))
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def fd_laplace_oracle(domain, f, h: float) -> FDGrid:
    """Shortley–Weller five-point solve on the grid ``h * Z^2``.

    Grid lines leaving the domain are cut at the exact boundary crossing
    (found by bisection on membership) and the data ``f`` is imposed there,
    so the scheme stays second order on curved boundaries.
    """
    if not h > 0:
        raise InvalidInputError("grid step must be positive")
    contains = domain.contains
    x0, x1, y0, y1 = domain.bbox()
    ix = np.arange(math.floor(x0 / h) - 1, math.ceil(x1 / h) + 2)
    iy = np.arange(math.floor(y0 / h) - 1, math.ceil(y1 / h) + 2)
    xs, ys = ix * h, iy * h
    Z = xs[None, :] + 1j * ys[:, None]
    inside = contains(Z)
    idx = -np.ones(Z.shape, int)
    n_int = int(np.count_nonzero(inside))
    if n_int < 10:
        raise ResolutionError(f"only {n_int} interior grid nodes; refine h")
    idx[inside] = np.arange(n_int)
    jj, ii = np.nonzero(inside)
    z = Z[jj, ii]
    # arm length and boundary value in each of the four grid directions
    dirs = {"e": (0, 1, 1), "w": (0, -1, -1), "n": (1, 0, 1j), "s": (-1, 0, -1j)}
    arm, bval, nb_in = {}, {}, {}
    for key, (dj, di, step) in dirs.items():
        nb_in[key] = inside[jj + dj, ii + di]
        arm[key] = np.full(n_int, h)
        bval[key] = np.zeros(n_int, complex)
        out = ~nb_in[key]
        if np.any(out):
            t = _crossing(contains, z[out], z[out] + step * h)
            arm[key][out] = np.maximum(t, 1e-12) * h
            bval[key][out] = f(z[out] + step * arm[key][out])
    r = np.arange(n_int)
    rows, cols, vals = [r], [r], []
    rhs = np.zeros(n_int, complex)
    diag = np.zeros(n_int)
    for key, opp in (("e", "w"), ("w", "e"), ("n", "s"), ("s", "n")):
        dj, di, _ = dirs[key]
        w = 2.0 / (arm[key] * (arm[key] + arm[opp]))
        diag += w
        m = nb_in[key]
        rows.append(r[m])
        cols.append(idx[jj + dj, ii + di][m])
        vals.append(-w[m])
        rhs[~m] += w[~m] * bval[key][~m]
    vals.insert(0, diag)
    A = coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                   shape=(n_int, n_int)).tocsr()
    b = rhs if np.any(rhs.imag) else rhs.real
    u = spsolve(A, b)
    res = float(np.max(np.abs(A @ u - b)))
    res /= float(np.max(diag)) * max(float(np.max(np.abs(u))), 1e-300) + float(np.max(np.abs(b)))
    if not np.all(np.isfinite(u)) or res > 1e-10:
        raise ResolutionError(f"finite-difference system not solved accurately (residual {res:.2e})")
    values = np.full(Z.shape, np.nan, u.dtype)
    values[inside] = u
    return FDGrid(xs, ys, values, inside, res)
