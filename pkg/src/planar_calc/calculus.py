"""Holomorphic functional calculus for dense complex matrices.

``f(x)`` is the Cauchy integral ``(1/2 pi i) ∮ f(z) (z I - x)^{-1} dz`` over a
set of circles around the eigenvalue clusters, discretized by the trapezoid
rule.  On a circle the rule converges geometrically, so nodes are doubled
until two successive sums agree.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .errors import (ConvergenceError, InvalidInputError, NearSingularError, PreconditionError,
                     QuadratureError)

# defective eigenvalues come back split by about sqrt(eps) * ||x||
CLUSTER_TOL = 1e-7
QUAD_TOL = 1e-11
QUAD_MIN_NODES = 32
QUAD_MAX_NODES = 1 << 16


def as_cmatrix(x) -> np.ndarray:
    a = np.asarray(x)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix entries must be finite")
    return a.astype(complex)


def opnorm(x) -> float:
    x = np.asarray(x)
    return float(np.linalg.norm(x, 2)) if x.size else 0.0


# --------------------------------------------------------------------------
# spectrum


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with algebraic multiplicity.

    ``points`` lists every eigenvalue, with each numerically split cluster
    replaced by its mean; ``labels[i]`` is the cluster of ``points[i]``.
    """

    points: np.ndarray
    labels: np.ndarray

    @property
    def clusters(self):
        out = []
        for k in np.unique(self.labels):
            members = self.points[self.labels == k]
            out.append((complex(members[0]), int(members.size)))
        return out

    def __len__(self):
        return self.points.size


def _cluster(eigs, tol):
    if eigs.size == 1:
        return np.zeros(1, int)
    pts = np.column_stack([eigs.real, eigs.imag])
    Z = linkage(pts, method="single")
    return fcluster(Z, t=tol, criterion="distance") - 1


def spectrum(x, tol: float = CLUSTER_TOL) -> Spectrum:
    x = as_cmatrix(x)
    eigs = np.linalg.eigvals(x)
    labels = _cluster(eigs, tol * max(opnorm(x), np.finfo(float).tiny))
    pts = eigs.copy()
    for k in np.unique(labels):
        m = labels == k
        pts[m] = eigs[m].mean()
    order = np.lexsort((pts.imag, pts.real))
    return Spectrum(pts[order], labels[order])


def hausdorff(a, b) -> float:
    a = np.atleast_1d(np.asarray(a, complex))
    b = np.atleast_1d(np.asarray(b, complex))
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def spectral_radius(x) -> float:
    return float(np.max(np.abs(spectrum(x).points)))


# --------------------------------------------------------------------------
# resolvent and contours


def resolvent(x, z: complex) -> np.ndarray:
    """``(z I - x)^{-1}``; refuses points within ``1e-10 ||x||`` of the spectrum."""
    x = as_cmatrix(x)
    dist = float(np.min(np.abs(np.linalg.eigvals(x) - z)))
    if dist <= 1e-10 * opnorm(x) or dist == 0.0:
        raise NearSingularError(f"z = {z} lies {dist:.3e} from the spectrum", distance=dist)
    n = x.shape[0]
    return np.linalg.solve(z * np.eye(n) - x, np.eye(n))


@dataclass(frozen=True)
class CalcContour:
    """Positively oriented circles ``(center, radius)`` around the spectrum."""

    circles: tuple
    nodes_per_circle: int = QUAD_MIN_NODES

    def encloses(self, pts, margin=0.0):
        pts = np.atleast_1d(np.asarray(pts, complex))
        inside = np.zeros(pts.size, bool)
        for c, r in self.circles:
            inside |= np.abs(pts - c) < r - margin
        return inside


def default_contour(x, singular_distance: Callable[[complex], float] | None = None) -> CalcContour:
    """One circle per eigenvalue cluster.

    The radius exceeds the cluster's own spread by ``0.1 * scale`` at most and
    by less than half of the free gap to other clusters and to the
    singularities of ``f`` (given as ``singular_distance(point)``).  With that
    rule distinct circles never meet.
    """
    x = as_cmatrix(x)
    scale = max(opnorm(x), 1.0)
    eigs = np.linalg.eigvals(x)
    labels = _cluster(eigs, CLUSTER_TOL * max(opnorm(x), np.finfo(float).tiny))
    groups = [eigs[labels == k] for k in np.unique(labels)]
    centers = [g.mean() for g in groups]
    spreads = [float(np.max(np.abs(g - c))) for g, c in zip(groups, centers)]
    circles = []
    for i, (c, rho) in enumerate(zip(centers, spreads)):
        gap = np.inf
        for j, (c2, rho2) in enumerate(zip(centers, spreads)):
            if j != i:
                gap = min(gap, abs(c - c2) - rho2)
        if singular_distance is not None:
            gap = min(gap, float(singular_distance(c)))
        if gap <= rho:
            raise NearSingularError("no circle separates this eigenvalue cluster from the rest", distance=gap)
        pad = min(0.1 * scale, 0.45 * (gap - rho)) if np.isfinite(gap) else 0.1 * scale
        # an isolated simple eigenvalue still needs a circle of positive size
        circles.append((complex(c), rho + max(pad, 0.0)))
    return CalcContour(tuple(circles))


def _circle_sum(x, f, c, r, n, offset=0.0):
    """Trapezoid sum of the Cauchy integral on nodes ``2 pi (j + offset) / n``.

    Also returns ``max |f|`` over the nodes, used as a floor for the
    relative stopping test.
    """
    theta = 2.0 * np.pi * (np.arange(n) + offset) / n
    w = r * np.exp(1j * theta)
    zeta = c + w
    dim = x.shape[0]
    eye = np.eye(dim)
    R = np.linalg.solve(zeta[:, None, None] * eye - x[None], np.broadcast_to(eye, (n, dim, dim)))
    fz = np.asarray(f(zeta), complex)
    return np.tensordot(fz * w, R, axes=(0, 0)) / n, float(np.max(np.abs(fz)))


def holo_calc(x, f: Callable, contour: CalcContour | None = None, tol: float = QUAD_TOL,
              singular_distance=None, return_info: bool = False):
    """``f(x)`` by contour quadrature.

    Parameters
    ----------
    x : (n, n) array_like
    f : callable
        Vectorized, holomorphic on and inside every circle of ``contour``.
    contour : CalcContour, optional
        Defaults to :func:`default_contour` with ``singular_distance``.
    tol : float
        Relative change between node doublings at which a circle is accepted.
    """
    x = as_cmatrix(x)
    if contour is None:
        contour = default_contour(x, singular_distance)
    total = np.zeros_like(x)
    nodes = []
    for c, r in contour.circles:
        n = max(contour.nodes_per_circle, 4)
        T, fmax = _circle_sum(x, f, c, r, n)
        while True:
            if 2 * n > QUAD_MAX_NODES:
                raise QuadratureError(f"trapezoid rule did not settle on circle |z - {c}| = {r} "
                                      f"with {n} nodes")
            odd, fodd = _circle_sum(x, f, c, r, n, offset=0.5)
            fmax = max(fmax, fodd)
            T2 = 0.5 * (T + odd)
            n *= 2
            change = np.max(np.abs(T2 - T))
            size = max(np.max(np.abs(T2)), 1e-5 * fmax, np.finfo(float).tiny)
            T = T2
            if change <= tol * size:
                break
        nodes.append(n)
        total += T
    if return_info:
        return total, {"circles": [[c.real, c.imag, r] for c, r in contour.circles], "nodes": nodes}
    return total


# --------------------------------------------------------------------------
# predicates and the square root


class NormalityReport(NamedTuple):
    normal: bool
    defect: float


def is_star_normal(x, tol: float = 1e-10) -> NormalityReport:
    """Commutator certificate ``||x* x - x x*|| / ||x||^2 <= tol``."""
    x = as_cmatrix(x)
    nx = opnorm(x)
    if nx == 0.0:
        return NormalityReport(True, 0.0)
    xh = x.conj().T
    defect = opnorm(xh @ x - x @ xh) / nx ** 2
    return NormalityReport(bool(defect <= tol), float(defect))


def superpositive_check(x, tol: float = 1e-10) -> bool:
    """Every eigenvalue lies in the cone ``Re z >= 0``, ``|Im z| <= Re z``."""
    x = as_cmatrix(x)
    slack = tol * opnorm(x)
    z = np.linalg.eigvals(x)
    return bool(np.all(z.real >= -slack) and np.all(np.abs(z.imag) <= z.real + slack))


def _distance_to_cut(eps):
    """Distance from a point to the branch cut ``(-inf, -eps]`` of ``sqrt(z + eps)``."""
    def dist(c):
        t = min(c.real, -eps)
        return abs(c - t)
    return dist


SQRT_STEP_TOL = 1e-12


def sqrt_superpositive(x, return_info: bool = False):
    """Square root of a superpositive matrix as the limit of ``sqrt(x + eps)``.

    ``eps`` runs through ``1e-2, 1e-4, ...``; each root is a contour integral
    of the principal branch of ``sqrt(z + eps)``, whose cut stays left of the
    spectrum.  The sequence stops when two successive roots agree to
    ``1e-12 ||x||``.  If ``eps`` reaches the rounding floor first, the last
    root is accepted only when it squares back to ``x`` within ``1e-8 ||x||``
    and the steps were still shrinking.
    """
    x = as_cmatrix(x)
    if not superpositive_check(x):
        raise PreconditionError("matrix is not superpositive: some eigenvalue lies outside "
                                "Re z >= 0, |Im z| <= Re z")
    scale = opnorm(x)
    if scale == 0.0:
        return (x.copy(), {"eps": 0.0, "steps": 0}) if return_info else x.copy()
    floor = 1e-16 * scale
    eps = 1e-2 * scale
    y, steps = None, []

    def settled(y):
        shrinking = len(steps) >= 2 and steps[-1] < steps[-2]
        return shrinking and opnorm(y @ y - x) <= 1e-8 * scale

    while True:
        try:
            y_new = holo_calc(x, lambda z, e=eps: np.sqrt(z + e), singular_distance=_distance_to_cut(eps))
        except QuadratureError as err:
            # the resolvent near a non-semisimple zero eigenvalue is too ill
            # conditioned for this eps; keep the previous root only if it is good
            if y is not None and settled(y):
                break
            raise ConvergenceError(f"sqrt(x + eps) broke down at eps = {eps:.1e}: {err}") from err
        if y is not None:
            steps.append(float(np.max(np.abs(y_new - y))))
        y = y_new
        if steps and steps[-1] < SQRT_STEP_TOL * scale:
            break
        if eps / 100 < floor:
            if settled(y):
                break
            raise ConvergenceError(f"sqrt(x + eps) did not settle before eps reached {eps:.1e}; "
                                   f"last step {steps[-1] if steps else float('nan'):.3e}, "
                                   f"||y^2 - x|| = {opnorm(y @ y - x):.3e}")
        eps /= 100
    if return_info:
        return y, {"eps": eps, "steps": steps}
    return y
