"""JSON and CSV formats for domains, boundary data, matrices and reports.

Schema problems raise :class:`InvalidInputError` naming the offending path,
e.g. ``disks[1].r``; malformed JSON reports line and column.
"""
from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .disk import BoundarySamples, trace_interpolant
from .errors import InvalidInputError
from .geometry import Disk, HalfPlane, cut_halfplane, fill_holes, make_disk_union


def read_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise InvalidInputError(f"{path}: cannot read ({err.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise InvalidInputError(f"{path}:{err.lineno}:{err.colno}: invalid JSON ({err.msg})") from None


def digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


# --------------------------------------------------------------------------
# schema helpers


def _number(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        raise InvalidInputError(f"{where}: expected a finite number, got {v!r}")
    return float(v)


def _point(v, where):
    if not isinstance(v, list) or len(v) != 2:
        raise InvalidInputError(f"{where}: expected [re, im], got {v!r}")
    return complex(_number(v[0], f"{where}[0]"), _number(v[1], f"{where}[1]"))


def _list(v, where):
    if not isinstance(v, list):
        raise InvalidInputError(f"{where}: expected a list")
    return v


def _object(v, where, allowed):
    if not isinstance(v, dict):
        raise InvalidInputError(f"{where or 'document'}: expected a JSON object")
    extra = set(v) - set(allowed)
    if extra:
        raise InvalidInputError(f"{where or 'document'}: unknown keys {sorted(extra)}")
    return v


def _require(obj, key, where):
    if key not in obj:
        raise InvalidInputError(f"{where + '.' if where else ''}{key}: missing")
    return obj[key]


# --------------------------------------------------------------------------
# domains: {"disks": [{"c": [re, im], "r": r}], "cuts": [...], "fill": bool}


def parse_disk(obj, where="disk") -> Disk:
    _object(obj, where, ("c", "r"))
    c = _point(_require(obj, "c", where), f"{where}.c")
    r = _number(_require(obj, "r", where), f"{where}.r")
    return Disk(c, r)


def parse_domain(obj):
    """Union of the disks, then each cut in order, then hole filling if requested."""
    _object(obj, "", ("disks", "cuts", "fill"))
    disks = [parse_disk(d, f"disks[{i}]") for i, d in enumerate(_list(_require(obj, "disks", ""), "disks"))]
    cset = make_disk_union(disks)
    for i, cut in enumerate(_list(obj.get("cuts", []), "cuts")):
        where = f"cuts[{i}]"
        _object(cut, where, ("p", "dir", "keep"))
        p = _point(_require(cut, "p", where), f"{where}.p")
        d = _point(_require(cut, "dir", where), f"{where}.dir")
        keep = cut.get("keep", "left")
        if keep not in ("left", "right"):
            raise InvalidInputError(f"{where}.keep: expected 'left' or 'right', got {keep!r}")
        cset = cut_halfplane(cset, HalfPlane(p, d, keep))
    fill = obj.get("fill", False)
    if not isinstance(fill, bool):
        raise InvalidInputError("fill: expected true or false")
    return fill_holes(cset) if fill else cset


# --------------------------------------------------------------------------
# boundary data: {"circle": {"c": [re, im], "r": r}, "samples": [[re, im], ...]}


def parse_boundary(obj) -> BoundarySamples:
    _object(obj, "", ("circle", "samples"))
    disk = parse_disk(_require(obj, "circle", ""), "circle")
    raw = _list(_require(obj, "samples", ""), "samples")
    vals = np.array([_point(v, f"samples[{i}]") for i, v in enumerate(raw)])
    if vals.size and not np.any(vals.imag):
        vals = vals.real
    return BoundarySamples(disk, vals)


def boundary_to_json(bd: BoundarySamples) -> dict:
    vals = np.asarray(bd.values, complex)
    return {"circle": {"c": [bd.disk.center.real, bd.disk.center.imag], "r": bd.disk.radius},
            "samples": [[float(v.real), float(v.imag)] for v in vals]}


def boundary_function(bd: BoundarySamples):
    """Data as a function of the plane: the periodic cubic interpolant of the
    samples, read off at the angle of ``z`` about the circle's center."""
    spline = trace_interpolant(bd)
    c = bd.disk.center
    return lambda z: spline(np.angle(np.asarray(z, complex) - c))


# --------------------------------------------------------------------------
# matrices: {"n": k, "entries": [[[re, im], ...], ...]}


def parse_matrix(obj) -> np.ndarray:
    _object(obj, "", ("n", "entries", "provenance"))
    n = _require(obj, "n", "")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidInputError(f"n: expected a positive integer, got {n!r}")
    rows = _list(_require(obj, "entries", ""), "entries")
    if len(rows) != n:
        raise InvalidInputError(f"entries: expected {n} rows, got {len(rows)}")
    out = np.empty((n, n), complex)
    for i, row in enumerate(rows):
        row = _list(row, f"entries[{i}]")
        if len(row) != n:
            raise InvalidInputError(f"entries[{i}]: expected {n} entries, got {len(row)}")
        for j, v in enumerate(row):
            out[i, j] = _point(v, f"entries[{i}][{j}]")
    return out


def matrix_to_json(x) -> dict:
    x = np.asarray(x, complex)
    return {"n": int(x.shape[0]),
            "entries": [[[float(v.real), float(v.imag)] for v in row] for row in x]}


def parse_coeffs(obj) -> np.ndarray:
    """Polynomial coefficients, lowest degree first: numbers or ``[re, im]`` pairs."""
    if isinstance(obj, dict):
        _object(obj, "", ("coeffs",))
        obj = _require(obj, "coeffs", "")
    raw = _list(obj, "coeffs")
    if not raw:
        raise InvalidInputError("coeffs: need at least one coefficient")
    return np.array([_point(v, f"coeffs[{i}]") if isinstance(v, list) else _number(v, f"coeffs[{i}]")
                     for i, v in enumerate(raw)], complex)


# --------------------------------------------------------------------------
# grids


def write_grid_csv(path, z, values):
    """Columns ``x,y,value``; complex data gets an extra ``value_imag`` column."""
    z = np.asarray(z, complex).ravel()
    v = np.asarray(values).ravel()
    cplx = np.iscomplexobj(v) and np.any(np.imag(v))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "value"] + (["value_imag"] if cplx else []))
        for p, u in zip(z, v):
            row = [repr(float(p.real)), repr(float(p.imag)), repr(float(np.real(u)))]
            if cplx:
                row.append(repr(float(np.imag(u))))
            w.writerow(row)


def read_grid_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    z = np.array([float(r["x"]) + 1j * float(r["y"]) for r in rows])
    v = np.array([float(r["value"]) + 1j * float(r.get("value_imag") or 0.0) for r in rows])
    return z, v if np.any(v.imag) else v.real
