"""Constructive compact planar sets and their boundary contours.

A :class:`CompactSet` is a finite union of *pieces*.  A piece is either a closed
disk intersected with closed half-planes, or a filled hole (a region bounded by
a contour that was once an inner boundary of the set) intersected with
half-planes.  This representation is closed under the three structural moves
used for building domains: cutting by a half-plane, symmetrizing under a line
reflection, and filling holes.

Membership is exact for disk/half-plane pieces.  Filled holes use a polygon
whose edges are chords of the hole's arcs; the chords lie inside the disks that
carry the arcs, so the union with the remaining pieces is still exact.

Boundaries are extracted by splitting every candidate curve (circles, cut
chords, edges of filled polygons) at all mutual intersection parameters and keeping the
sub-curves that have the set on their left and the complement on their right.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import ndimage

from .errors import DegenerateGeometryError, InvalidInputError

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# primitives


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidInputError(f"disk radius must be positive, got {self.radius}")
        if not (math.isfinite(self.center.real) and math.isfinite(self.center.imag)):
            raise InvalidInputError("disk center must be finite")

    def contains(self, z, tol=0.0):
        return np.abs(np.asarray(z) - self.center) <= self.radius + tol

    def contains_open(self, z, tol=0.0):
        return np.abs(np.asarray(z) - self.center) < self.radius - tol


@dataclass(frozen=True)
class Line:
    """Oriented line through ``point`` along ``direction``."""

    point: complex
    direction: complex

    def __post_init__(self):
        d = complex(self.direction)
        if d == 0 or not math.isfinite(abs(d)):
            raise InvalidInputError("line direction must be a nonzero finite vector")
        object.__setattr__(self, "point", complex(self.point))
        object.__setattr__(self, "direction", d / abs(d))

    def reflect(self, z):
        d = self.direction
        return self.point + d * d * np.conj(np.asarray(z) - self.point)

    def reflect_vector(self, v):
        d = self.direction
        return d * d * np.conj(v)


REAL_AXIS = Line(0j, 1 + 0j)


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane on the ``keep`` side ('left' or 'right') of an oriented line."""

    point: complex
    direction: complex
    keep: str = "left"

    def __post_init__(self):
        if self.keep not in ("left", "right"):
            raise InvalidInputError(f"keep must be 'left' or 'right', got {self.keep!r}")
        line = Line(self.point, self.direction)
        object.__setattr__(self, "point", line.point)
        object.__setattr__(self, "direction", line.direction)

    @property
    def line(self):
        return Line(self.point, self.direction)

    def side(self, z):
        s = np.imag(np.conj(self.direction) * (np.asarray(z) - self.point))
        return s if self.keep == "left" else -s

    def contains(self, z, tol=0.0):
        return self.side(z) >= -tol

    def reflected(self, axis: Line) -> HalfPlane:
        keep = "right" if self.keep == "left" else "left"
        return HalfPlane(complex(axis.reflect(self.point)),
                         complex(axis.reflect_vector(self.direction)), keep)

    @property
    def inward_direction(self):
        """Direction of travel along the line that keeps the half-plane on the left."""
        return self.direction if self.keep == "left" else -self.direction


# --------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class Arc:
    """Circular arc ``center + radius*exp(i*(start + s*sweep))``, s in [0, 1]."""

    center: complex
    radius: float
    start: float
    sweep: float

    def point(self, s):
        return self.center + self.radius * np.exp(1j * (self.start + np.asarray(s) * self.sweep))

    @property
    def start_point(self):
        return complex(self.point(0.0))

    @property
    def end_point(self):
        return complex(self.point(1.0))

    @property
    def length(self):
        return self.radius * abs(self.sweep)

    def tangent(self, s):
        return 1j * math.copysign(1.0, self.sweep) * np.exp(1j * (self.start + np.asarray(s) * self.sweep))

    def left_normal(self, s):
        return 1j * self.tangent(s)

    def params_of(self, points):
        """Curve parameters of points on the supporting circle (may fall outside [0, 1])."""
        ang = np.angle(np.asarray(points) - self.center)
        rel = np.mod((ang - self.start) * math.copysign(1.0, self.sweep), TWO_PI)
        return rel / abs(self.sweep)

    def sub(self, s0, s1) -> Arc:
        return Arc(self.center, self.radius, self.start + s0 * self.sweep, (s1 - s0) * self.sweep)

    def reversed(self) -> Arc:
        return Arc(self.center, self.radius, self.start + self.sweep, -self.sweep)

    def reflected(self, axis: Line) -> Arc:
        theta = math.atan2(axis.direction.imag, axis.direction.real)
        return Arc(complex(axis.reflect(self.center)), self.radius, 2 * theta - self.start, -self.sweep)

    def signed_area_term(self):
        t0, t1 = self.start, self.start + self.sweep
        cx, cy, r = self.center.real, self.center.imag, self.radius
        return 0.5 * (r * cx * (math.sin(t1) - math.sin(t0))
                      - r * cy * (math.cos(t1) - math.cos(t0)) + r * r * (t1 - t0))

    def support(self):
        return ("circle", self.center, self.radius)


@dataclass(frozen=True)
class Segment:
    a: complex
    b: complex

    def point(self, s):
        return self.a + np.asarray(s) * (self.b - self.a)

    @property
    def start_point(self):
        return complex(self.a)

    @property
    def end_point(self):
        return complex(self.b)

    @property
    def length(self):
        return abs(self.b - self.a)

    def tangent(self, s=0.0):
        return (self.b - self.a) / abs(self.b - self.a) + 0 * np.asarray(s)

    def left_normal(self, s=0.0):
        return 1j * self.tangent(s)

    def params_of(self, points):
        d = self.b - self.a
        return np.real(np.conj(d) * (np.asarray(points) - self.a)) / abs(d) ** 2

    def sub(self, s0, s1) -> Segment:
        return Segment(complex(self.point(s0)), complex(self.point(s1)))

    def reversed(self) -> Segment:
        return Segment(self.b, self.a)

    def reflected(self, axis: Line) -> Segment:
        return Segment(complex(axis.reflect(self.a)), complex(axis.reflect(self.b)))

    def signed_area_term(self):
        return 0.5 * (self.a.real * self.b.imag - self.b.real * self.a.imag)

    def support(self):
        return ("line", self.a, (self.b - self.a) / abs(self.b - self.a))


@dataclass(frozen=True)
class Contour:
    """Closed boundary curve, oriented so that the set lies on its left."""

    segments: tuple
    orientation: int = 1

    @property
    def length(self):
        return sum(s.length for s in self.segments)

    @property
    def signed_area(self):
        return sum(s.signed_area_term() for s in self.segments)

    @property
    def is_hole(self):
        return self.signed_area < 0

    def sample(self, n):
        """``n`` points equispaced in arc length, with the outward unit normals."""
        lengths = np.array([s.length for s in self.segments])
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        t = (np.arange(n) + 0.5) * cum[-1] / n
        idx = np.clip(np.searchsorted(cum, t, side="right") - 1, 0, len(lengths) - 1)
        pts = np.empty(n, complex)
        nrm = np.empty(n, complex)
        for k, seg in enumerate(self.segments):
            sel = idx == k
            if np.any(sel):
                s = (t[sel] - cum[k]) / lengths[k]
                pts[sel] = seg.point(s)
                nrm[sel] = -seg.left_normal(s)
        return pts, nrm

    def polyline(self, max_angle=math.radians(1.0)):
        pts = []
        for seg in self.segments:
            if isinstance(seg, Arc):
                n = max(2, int(math.ceil(abs(seg.sweep) / max_angle)))
                pts.extend(seg.point(np.arange(n) / n))
            else:
                pts.append(seg.a)
        return np.asarray(pts, complex)

    def reversed(self) -> Contour:
        return Contour(tuple(s.reversed() for s in reversed(self.segments)), self.orientation)

    def reflected(self, axis: Line) -> Contour:
        mirrored = Contour(tuple(s.reflected(axis) for s in self.segments), self.orientation)
        return mirrored.reversed()


# --------------------------------------------------------------------------
# intersections of supporting circles and lines


def circle_circle(c1, r1, c2, r2):
    d = abs(c2 - c1)
    if d == 0 or d > r1 + r2 or d < abs(r1 - r2):
        return []
    a = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
    h2 = r1 * r1 - a * a
    h = math.sqrt(max(h2, 0.0))
    u = (c2 - c1) / d
    base = c1 + a * u
    if h == 0:
        return [base]
    return [base + 1j * h * u, base - 1j * h * u]


def circle_line(c, r, p, d):
    """Intersections of a circle with the line ``p + t*d`` (``|d| = 1``), as points."""
    w = p - c
    b = (np.conj(d) * w).real
    disc = b * b - (abs(w) ** 2 - r * r)
    if disc < 0:
        return []
    s = math.sqrt(disc)
    if s == 0:
        return [p - b * d]
    return [p + (-b - s) * d, p + (-b + s) * d]


def line_line(p1, d1, p2, d2):
    den = (np.conj(d1) * d2).imag
    if abs(den) < 1e-14:
        return []
    t = (np.conj(p2 - p1) * d2).imag / den
    return [p1 + t * d1]


def _intersect(sup_a, sup_b):
    ka, kb = sup_a[0], sup_b[0]
    if ka == "circle" and kb == "circle":
        if abs(sup_a[1] - sup_b[1]) < 1e-14 and abs(sup_a[2] - sup_b[2]) < 1e-14:
            return []
        return circle_circle(sup_a[1], sup_a[2], sup_b[1], sup_b[2])
    if ka == "circle":
        return circle_line(sup_a[1], sup_a[2], sup_b[1], sup_b[2])
    if kb == "circle":
        return circle_line(sup_b[1], sup_b[2], sup_a[1], sup_a[2])
    return line_line(sup_a[1], sup_a[2], sup_b[1], sup_b[2])


# --------------------------------------------------------------------------
# pieces


def _points_in_polygon(z, poly, chunk=1 << 22):
    """Even-odd rule; ``poly`` is an open ring of complex vertices.

    Edges are vectorized and points processed in chunks of about ``chunk``
    point-edge pairs to keep memory bounded.
    """
    z = np.asarray(z, complex)
    flat = z.ravel()
    out = np.zeros(flat.size, bool)
    a, b = poly, np.roll(poly, -1)
    keep = a.imag != b.imag
    a, b = a[keep], b[keep]
    if a.size == 0:
        return out.reshape(z.shape)
    slope = (b.real - a.real) / (b.imag - a.imag)
    x, y = flat.real, flat.imag
    cand = np.flatnonzero((x >= poly.real.min()) & (x <= poly.real.max())
                          & (y >= poly.imag.min()) & (y <= poly.imag.max()))
    step = max(1, chunk // a.size)
    for s in range(0, cand.size, step):
        idx = cand[s:s + step]
        yy = y[idx, None]
        crosses = (a.imag > yy) != (b.imag > yy)
        xint = a.real + (yy - a.imag) * slope
        out[idx] = np.count_nonzero(crosses & (x[idx, None] < xint), axis=1) % 2 == 1
    return out.reshape(z.shape)


@dataclass(frozen=True)
class DiskPiece:
    disk: Disk
    cuts: tuple = ()

    def contains(self, z):
        mask = self.disk.contains(z)
        for cut in self.cuts:
            mask = mask & cut.contains(z)
        return mask

    def candidate_curves(self):
        c, r = self.disk.center, self.disk.radius
        curves = [Arc(c, r, 0.0, TWO_PI)]
        for cut in self.cuts:
            pts = circle_line(c, r, cut.point, cut.direction)
            if len(pts) == 2:
                d = cut.inward_direction
                a, b = sorted(pts, key=lambda q: (np.conj(d) * q).real)
                curves.append(Segment(complex(a), complex(b)))
        return curves

    def with_cut(self, cut):
        return DiskPiece(self.disk, self.cuts + (cut,))

    def reflected(self, axis):
        return DiskPiece(Disk(complex(axis.reflect(self.disk.center)), self.disk.radius),
                         tuple(c.reflected(axis) for c in self.cuts))

    def bbox(self):
        c, r = self.disk.center, self.disk.radius
        return c.real - r, c.real + r, c.imag - r, c.imag + r

    def key(self):
        return ("disk", _rkey(self.disk.center), round(self.disk.radius, 10),
                tuple(sorted(_cut_key(c) for c in self.cuts)))


@dataclass(frozen=True)
class FilledPiece:
    contour: Contour
    cuts: tuple = ()
    polygon: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.polygon is None:
            object.__setattr__(self, "polygon", self.contour.polyline())

    def contains(self, z):
        mask = _points_in_polygon(z, self.polygon)
        for cut in self.cuts:
            mask = mask & cut.contains(z)
        return mask

    def candidate_curves(self):
        # polygon edges, not the exact arcs, so that candidates agree with membership
        ring = self.polygon
        curves = [Segment(complex(a), complex(b)) for a, b in zip(ring, np.roll(ring, -1)) if a != b]
        x0, x1, y0, y1 = self.bbox()
        center = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
        rad = 0.5 * math.hypot(x1 - x0, y1 - y0) * 1.01 + 1e-12
        for cut in self.cuts:
            pts = circle_line(center, rad, cut.point, cut.direction)
            if len(pts) == 2:
                d = cut.inward_direction
                a, b = sorted(pts, key=lambda q: (np.conj(d) * q).real)
                curves.append(Segment(complex(a), complex(b)))
        return curves

    def with_cut(self, cut):
        return FilledPiece(self.contour, self.cuts + (cut,), self.polygon)

    def reflected(self, axis):
        return FilledPiece(self.contour.reflected(axis), tuple(c.reflected(axis) for c in self.cuts))

    def bbox(self):
        p = self.polygon
        return p.real.min(), p.real.max(), p.imag.min(), p.imag.max()

    def key(self):
        p = self.polygon
        return ("fill", _rkey(p.mean()), round(float(np.abs(p - p.mean()).max()), 8),
                tuple(sorted(_cut_key(c) for c in self.cuts)))


def _rkey(z, nd=10):
    return (round(z.real, nd) + 0.0, round(z.imag, nd) + 0.0)


def _cut_key(cut):
    return _rkey(cut.point) + _rkey(cut.direction) + (cut.keep,)


# --------------------------------------------------------------------------
# compact sets


@dataclass(frozen=True)
class CompactSet:
    pieces: tuple

    @property
    def disks(self):
        return tuple(p.disk for p in self.pieces if isinstance(p, DiskPiece))

    @property
    def cuts(self):
        seen, out = set(), []
        for p in self.pieces:
            for c in p.cuts:
                if _cut_key(c) not in seen:
                    seen.add(_cut_key(c))
                    out.append(c)
        return tuple(out)

    @property
    def filled(self):
        return any(isinstance(p, FilledPiece) for p in self.pieces)

    @property
    def is_disk_union(self):
        return all(isinstance(p, DiskPiece) and not p.cuts for p in self.pieces)

    def contains(self, z):
        z = np.asarray(z, complex)
        mask = np.zeros(z.shape, bool)
        for p in self.pieces:
            mask |= p.contains(z)
        return mask

    def bbox(self):
        boxes = np.array([p.bbox() for p in self.pieces])
        return boxes[:, 0].min(), boxes[:, 1].max(), boxes[:, 2].min(), boxes[:, 3].max()

    @property
    def scale(self):
        x0, x1, y0, y1 = self.bbox()
        return max(x1 - x0, y1 - y0)

    @cached_property
    def contours(self):
        return _extract_boundary(self)

    @property
    def area(self):
        return sum(c.signed_area for c in self.contours)


def _dedupe(pieces):
    seen, out = set(), []
    for p in pieces:
        k = p.key()
        if k not in seen:
            seen.add(k)
            out.append(p)
    return tuple(out)


def make_disk_union(disks) -> CompactSet:
    disks = list(disks)
    if not disks:
        raise InvalidInputError("a disk union needs at least one disk")
    disks = [d if isinstance(d, Disk) else Disk(*d) for d in disks]
    return CompactSet(_dedupe(DiskPiece(d) for d in disks))


def cut_halfplane(cset: CompactSet, cut: HalfPlane) -> CompactSet:
    candidates = [p.with_cut(cut) for p in cset.pieces]
    kept = []
    for p in candidates:
        try:
            _extract_boundary(CompactSet((p,)))
        except DegenerateGeometryError:
            continue
        kept.append(p)
    if not kept:
        raise DegenerateGeometryError("half-plane cut leaves an empty or measure-zero set")
    return CompactSet(_dedupe(kept))


def symmetrize(cset: CompactSet, axis: Line = REAL_AXIS) -> CompactSet:
    mirrored = [p.reflected(axis) for p in cset.pieces]
    return CompactSet(_dedupe(list(cset.pieces) + mirrored))


def fill_holes(cset: CompactSet) -> CompactSet:
    holes = [FilledPiece(c.reversed()) for c in cset.contours if c.is_hole]
    if not holes:
        return cset
    return CompactSet(_dedupe(list(cset.pieces) + holes))


def boundary(cset: CompactSet):
    return list(cset.contours)


# --------------------------------------------------------------------------
# boundary extraction


def _extract_boundary(cset: CompactSet):
    x0, x1, y0, y1 = cset.bbox()
    scale = max(x1 - x0, y1 - y0)
    tol = 1e-9 * scale
    probe = 1e-8 * scale

    curves = [c for p in cset.pieces for c in p.candidate_curves()]

    boxes = np.array([_curve_bbox(c) for c in curves])
    kept = []
    for i, curve in enumerate(curves):
        own = curve.support()
        near = ((boxes[:, 0] <= boxes[i, 1] + tol) & (boxes[:, 1] >= boxes[i, 0] - tol)
                & (boxes[:, 2] <= boxes[i, 3] + tol) & (boxes[:, 3] >= boxes[i, 2] - tol))
        others = []
        pts = []
        for j in np.flatnonzero(near):
            s = curves[j].support()
            if _same_support(own, s):
                # overlapping collinear or co-circular curves must share breakpoints
                pts.extend([curves[j].start_point, curves[j].end_point])
            elif not any(_same_support(s, t) for t in others):
                others.append(s)
        for s in others:
            pts.extend(_intersect(own, s))
        params = curve.params_of(np.asarray(pts, complex)) if pts else np.empty(0)
        eps = tol / max(curve.length, tol)
        params = np.unique(params[(params > eps) & (params < 1 - eps)])
        breaks = np.concatenate([[0.0], params, [1.0]])
        for s0, s1 in zip(breaks[:-1], breaks[1:]):
            piece = curve.sub(s0, s1)
            if piece.length <= tol:
                continue
            m = complex(piece.point(0.5))
            n = complex(piece.left_normal(0.5))
            inside = cset.contains(np.array([m + probe * n, m - probe * n]))
            if inside[0] and not inside[1]:
                if not any(_same_curve(piece, k, tol) for k in kept):
                    kept.append(piece)
    if not kept:
        raise DegenerateGeometryError("set has no boundary of positive length")
    return _chain(kept, tol)


def _curve_bbox(c):
    if isinstance(c, Segment):
        return min(c.a.real, c.b.real), max(c.a.real, c.b.real), min(c.a.imag, c.b.imag), max(c.a.imag, c.b.imag)
    r = c.radius
    return c.center.real - r, c.center.real + r, c.center.imag - r, c.center.imag + r


def _same_support(a, b):
    if a[0] != b[0]:
        return False
    if a[0] == "circle":
        return abs(a[1] - b[1]) < 1e-12 and abs(a[2] - b[2]) < 1e-12
    d = a[2]
    return abs((np.conj(d) * b[2]).imag) < 1e-12 and abs((np.conj(d) * (b[1] - a[1])).imag) < 1e-12


def _same_curve(p, q, tol):
    return (type(p) is type(q)
            and abs(p.start_point - q.start_point) <= tol
            and abs(p.end_point - q.end_point) <= tol
            and abs(complex(p.point(0.5)) - complex(q.point(0.5))) <= tol)


def _chain(pieces, tol):
    unused = list(pieces)
    contours = []
    while unused:
        chain = [unused.pop(0)]
        origin = chain[0].start_point
        while abs(chain[-1].end_point - origin) > tol:
            end = chain[-1].end_point
            t_in = complex(chain[-1].tangent(1.0))
            options = [k for k, c in enumerate(unused) if abs(c.start_point - end) <= tol]
            if not options:
                raise DegenerateGeometryError("boundary pieces do not close into a contour")
            # at pinch points continue along the smoothest branch
            best = max(options, key=lambda k: (np.conj(t_in) * complex(unused[k].tangent(0.0))).real)
            chain.append(unused.pop(best))
        contours.append(Contour(tuple(_merge(chain, tol))))
    return contours


def _merge(chain, tol):
    out = [chain[0]]
    for seg in chain[1:]:
        joined = _join(out[-1], seg, tol)
        if joined is None:
            out.append(seg)
        else:
            out[-1] = joined
    if len(out) > 1:
        joined = _join(out[-1], out[0], tol)
        if joined is not None:
            out = [joined] + out[1:-1]
    return out


def _join(p, q, tol):
    if isinstance(p, Arc) and isinstance(q, Arc):
        if (abs(p.center - q.center) <= tol and abs(p.radius - q.radius) <= tol
                and p.sweep * q.sweep > 0 and abs(p.end_point - q.start_point) <= tol):
            return Arc(p.center, p.radius, p.start, p.sweep + q.sweep)
    if isinstance(p, Segment) and isinstance(q, Segment):
        if abs(p.end_point - q.start_point) <= tol:
            dp, dq = p.tangent(), q.tangent()
            if abs((np.conj(dp) * dq).imag) < 1e-12 and (np.conj(dp) * dq).real > 0:
                return Segment(p.a, q.b)
    return None


# --------------------------------------------------------------------------
# grid oracles


def membership_grid(cset: CompactSet, resolution=1024, pad=0.1):
    x0, x1, y0, y1 = cset.bbox()
    w, h = x1 - x0, y1 - y0
    xs = np.linspace(x0 - pad * w, x1 + pad * w, resolution)
    ys = np.linspace(y0 - pad * h, y1 + pad * h, resolution)
    zz = xs[None, :] + 1j * ys[:, None]
    return xs, ys, cset.contains(zz)


def grid_components(cset: CompactSet, resolution=1024, pad=0.1):
    """Flood-fill counts ``(set components, bounded complementary components)``."""
    _, _, mask = membership_grid(cset, resolution, pad)
    _, n_set = ndimage.label(mask)
    labels, n_comp = ndimage.label(~mask)
    border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]])))
    holes = [k for k in range(1, n_comp + 1) if k not in border]
    return n_set, len(holes)
