"""Sampled predicates for the slice topology.

A :class:`SliceSet` maps every imaginary unit J to a planar region in the
coordinate x + iy <-> x + yJ (all y, so the lower half-plane stands for the
slice of -J). Regions form a small closed algebra with vectorised membership
and a certified lower bound on the distance to the complement, which is what
the openness checks consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from . import counterexample as cx
from .quaternion import (
    I_UNIT,
    ImaginaryUnit,
    Quaternion,
    as_unit,
    decompose,
    dist_to_slice,
    perpendicular_unit,
    unit_from_json,
    unit_to_json,
)

DEFAULT_UNITS = 512
DEFAULT_GRID = 512
DEFAULT_EXTENT = (-4.0, 4.0, -4.0, 4.0)


# --- planar regions --------------------------------------------------------


class Region:
    """A planar set with vectorised ``contains`` and ``clearance``.

    ``clearance(z)`` is a lower bound for the distance from z to the
    complement; it is 0 for non-members and may be 0 for boundary members.
    """

    def contains(self, z) -> np.ndarray:
        raise NotImplementedError

    def clearance(self, z) -> np.ndarray:
        raise NotImplementedError

    def boundary(self, n: int) -> np.ndarray:
        """Sample points on the boundary (members for closed descriptions)."""
        return np.empty(0, dtype=complex)

    def bbox(self) -> tuple[float, float, float, float] | None:
        return None

    def to_json(self) -> dict:
        raise TypeError(f"{type(self).__name__} has no JSON form")


def _z(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _merge_bbox(boxes):
    boxes = [b for b in boxes if b is not None]
    if not boxes:
        return None
    b = np.array(boxes)
    return (b[:, 0].min(), b[:, 1].max(), b[:, 2].min(), b[:, 3].max())


@dataclass(frozen=True)
class Disk(Region):
    center: complex
    radius: float
    closed: bool = False

    def contains(self, z):
        d = np.abs(_z(z) - self.center)
        return d <= self.radius if self.closed else d < self.radius

    def clearance(self, z):
        return np.where(self.contains(z), np.maximum(self.radius - np.abs(_z(z) - self.center), 0.0), 0.0)

    def boundary(self, n):
        return self.center + self.radius * np.exp(2j * np.pi * np.arange(n) / n)

    def bbox(self):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)

    def to_json(self):
        return {"kind": "disk", "center": [self.center.real, self.center.imag], "radius": self.radius, "closed": self.closed}


@dataclass(frozen=True)
class Annulus(Region):
    center: complex
    inner: float
    outer: float

    def contains(self, z):
        d = np.abs(_z(z) - self.center)
        return (d > self.inner) & (d < self.outer)

    def clearance(self, z):
        d = np.abs(_z(z) - self.center)
        return np.where(self.contains(z), np.minimum(self.outer - d, d - self.inner), 0.0)

    def boundary(self, n):
        e = np.exp(2j * np.pi * np.arange(n) / n)
        return np.concatenate([self.center + self.inner * e, self.center + self.outer * e])

    def bbox(self):
        return Disk(self.center, self.outer).bbox()

    def to_json(self):
        return {"kind": "annulus", "center": [self.center.real, self.center.imag], "inner": self.inner, "outer": self.outer}


@dataclass(frozen=True)
class Ellipse(Region):
    """((x - cx)/a)^2 + ((y - cy)/b)^2 < 1."""

    center: complex
    a: float
    b: float

    def _rho(self, z):
        w = _z(z) - self.center
        return np.sqrt((w.real / self.a) ** 2 + (w.imag / self.b) ** 2)

    def contains(self, z):
        return self._rho(z) < 1.0

    def clearance(self, z):
        # rho E is inside E, so a ball of radius (1 - rho) min(a, b) fits
        rho = self._rho(z)
        return np.where(rho < 1.0, (1.0 - rho) * min(self.a, self.b), 0.0)

    def boundary(self, n):
        t = 2.0 * np.pi * np.arange(n) / n
        return self.center + self.a * np.cos(t) + 1j * self.b * np.sin(t)

    def bbox(self):
        c = self.center
        return (c.real - self.a, c.real + self.a, c.imag - self.b, c.imag + self.b)

    def to_json(self):
        return {"kind": "ellipse", "center": [self.center.real, self.center.imag], "a": self.a, "b": self.b}


@dataclass(frozen=True)
class HalfPlane(Region):
    """Re(z conj(normal)) < offset, with |normal| = 1."""

    normal: complex
    offset: float

    def __post_init__(self):
        n = complex(self.normal)
        object.__setattr__(self, "normal", n / abs(n))

    def _s(self, z):
        return (_z(z) * np.conj(self.normal)).real

    def contains(self, z):
        return self._s(z) < self.offset

    def clearance(self, z):
        return np.maximum(self.offset - self._s(z), 0.0)

    def boundary(self, n):
        t = np.linspace(-4.0, 4.0, n)
        return self.normal * self.offset + 1j * self.normal * t

    def to_json(self):
        return {"kind": "halfplane", "normal": [self.normal.real, self.normal.imag], "offset": self.offset}


@dataclass(frozen=True, eq=False)
class PathComplement(Region):
    """The plane minus a polyline, with members required to keep ``margin`` away."""

    points: np.ndarray
    margin: float = 0.0

    def contains(self, z):
        return cx.dist_to_polyline(z, self.points) > self.margin

    def clearance(self, z):
        return np.maximum(cx.dist_to_polyline(z, self.points) - self.margin, 0.0)

    def boundary(self, n):
        idx = np.linspace(0, len(self.points) - 1, min(n, len(self.points))).astype(int)
        return self.points[idx]

    def to_json(self):
        return {"kind": "path_complement", "points": [[p.real, p.imag] for p in self.points], "margin": self.margin}


@dataclass(frozen=True)
class CutComplement(Region):
    """The plane minus the ideal cut gamma_s (its conjugate when ``reflected``)."""

    s: float
    reflected: bool = False
    arc_points: int = cx.ARC_POINTS

    def _w(self, z):
        z = _z(z)
        return np.conj(z) if self.reflected else z

    def contains(self, z):
        w = self._w(z)
        return ~cx.on_cut(w, self.s).reshape(w.shape)

    def clearance(self, z):
        w = self._w(z)
        return np.where(self.contains(z), cx.certified_clearance(w, self.s, self.arc_points).reshape(w.shape), 0.0)

    def boundary(self, n):
        pts = cx.cut_polyline(self.s, self.arc_points)
        pts = pts[np.linspace(0, len(pts) - 1, min(n, len(pts))).astype(int)]
        return np.conj(pts) if self.reflected else pts

    def to_json(self):
        return {"kind": "cut_complement", "s": self.s, "reflected": self.reflected}


@dataclass(frozen=True)
class Union(Region):
    parts: tuple[Region, ...]

    def contains(self, z):
        out = np.zeros(np.shape(z), dtype=bool)
        for p in self.parts:
            out |= p.contains(z)
        return out

    def clearance(self, z):
        out = np.zeros(np.shape(z))
        for p in self.parts:
            out = np.maximum(out, p.clearance(z))
        return out

    def boundary(self, n):
        return np.concatenate([p.boundary(n) for p in self.parts] or [np.empty(0, dtype=complex)])

    def bbox(self):
        return _merge_bbox(p.bbox() for p in self.parts)

    def to_json(self):
        return {"kind": "union", "parts": [p.to_json() for p in self.parts]}


@dataclass(frozen=True)
class Intersection(Region):
    parts: tuple[Region, ...]

    def contains(self, z):
        out = np.ones(np.shape(z), dtype=bool)
        for p in self.parts:
            out &= p.contains(z)
        return out

    def clearance(self, z):
        out = np.full(np.shape(z), np.inf)
        for p in self.parts:
            out = np.minimum(out, p.clearance(z))
        return np.where(self.contains(z), out, 0.0)

    def boundary(self, n):
        return Union(self.parts).boundary(n)

    def bbox(self):
        boxes = [p.bbox() for p in self.parts if p.bbox() is not None]
        if not boxes:
            return None
        b = np.array(boxes)
        return (b[:, 0].max(), b[:, 1].min(), b[:, 2].max(), b[:, 3].min())

    def to_json(self):
        return {"kind": "intersection", "parts": [p.to_json() for p in self.parts]}


@dataclass(frozen=True)
class Everything(Region):
    def contains(self, z):
        return np.ones(np.shape(z), dtype=bool)

    def clearance(self, z):
        return np.full(np.shape(z), np.inf)

    def to_json(self):
        return {"kind": "everything"}


@dataclass(frozen=True)
class Empty(Region):
    def contains(self, z):
        return np.zeros(np.shape(z), dtype=bool)

    def clearance(self, z):
        return np.zeros(np.shape(z))

    def bbox(self):
        return (0.0, 0.0, 0.0, 0.0)

    def to_json(self):
        return {"kind": "empty"}


@dataclass(frozen=True)
class Reflected(Region):
    """The image of ``base`` under z -> conj(z)."""

    base: Region

    def contains(self, z):
        return self.base.contains(np.conj(_z(z)))

    def clearance(self, z):
        return self.base.clearance(np.conj(_z(z)))

    def boundary(self, n):
        return np.conj(self.base.boundary(n))

    def bbox(self):
        b = self.base.bbox()
        return None if b is None else (b[0], b[1], -b[3], -b[2])

    def to_json(self):
        return {"kind": "reflected", "base": self.base.to_json()}


@dataclass(frozen=True)
class RealTrace(Region):
    """The real points of ``base``; no interior in the plane."""

    base: Region

    def contains(self, z):
        z = _z(z)
        return (z.imag == 0.0) & self.base.contains(z)

    def clearance(self, z):
        return np.zeros(np.shape(z))

    def boundary(self, n):
        b = self.bbox() or (-4.0, 4.0, 0.0, 0.0)
        return np.linspace(b[0], b[1], n).astype(complex)

    def bbox(self):
        b = self.base.bbox()
        return None if b is None else (b[0], b[1], 0.0, 0.0)

    def to_json(self):
        return {"kind": "real_trace", "base": self.base.to_json()}


def _cxj(v) -> complex:
    return complex(float(v[0]), float(v[1]))


def region_from_json(obj: dict) -> Region:
    kind = obj.get("kind")
    if kind == "disk":
        return Disk(_cxj(obj["center"]), float(obj["radius"]), bool(obj.get("closed", False)))
    if kind == "annulus":
        return Annulus(_cxj(obj["center"]), float(obj["inner"]), float(obj["outer"]))
    if kind == "ellipse":
        return Ellipse(_cxj(obj["center"]), float(obj["a"]), float(obj["b"]))
    if kind == "halfplane":
        return HalfPlane(_cxj(obj["normal"]), float(obj["offset"]))
    if kind == "path_complement":
        return PathComplement(np.array([_cxj(p) for p in obj["points"]]), float(obj.get("margin", 0.0)))
    if kind == "cut_complement":
        return CutComplement(float(obj["s"]), bool(obj.get("reflected", False)))
    if kind in ("union", "intersection"):
        parts = tuple(region_from_json(p) for p in obj["parts"])
        return Union(parts) if kind == "union" else Intersection(parts)
    if kind == "everything":
        return Everything()
    if kind == "empty":
        return Empty()
    if kind == "reflected":
        return Reflected(region_from_json(obj["base"]))
    if kind == "real_trace":
        return RealTrace(region_from_json(obj["base"]))
    raise ValueError(f"unknown region kind {kind!r}")


# --- slice sets ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SliceSet:
    """J -> planar region in the coordinate x + iy <-> x + yJ."""

    region_of: Callable[[ImaginaryUnit], Region]
    name: str = "slice_set"
    real_unit: ImaginaryUnit = I_UNIT

    def region(self, J) -> Region:
        return self.region_of(as_unit(J))

    def contains(self, q) -> bool:
        p = decompose(q)
        unit = self.real_unit if p.unit is None else p.unit
        return bool(self.region(unit).contains(complex(p.x, p.y)))

    def union(self, other: SliceSet) -> SliceSet:
        return SliceSet(lambda J: Union((self.region(J), other.region(J))), f"({self.name} | {other.name})")

    def intersection(self, other: SliceSet) -> SliceSet:
        return SliceSet(lambda J: Intersection((self.region(J), other.region(J))), f"({self.name} & {other.name})")

    __or__ = union
    __and__ = intersection


def ball(center, radius: float) -> SliceSet:
    """The Euclidean ball B(center, radius) in H, sliced exactly.

    With center a + b u, the slice of J is the disk around (a, b <J, u>) of
    squared radius r^2 - b^2 (1 - <J, u>^2).
    """
    p = decompose(Quaternion.coerce(center))
    r2 = float(radius) ** 2

    def region(J):
        c = 0.0 if p.unit is None else float(np.dot(J.vector, p.unit.vector))
        rad2 = r2 - p.y * p.y * (1.0 - c * c)
        if rad2 <= 0.0:
            return Empty()
        return Disk(complex(p.x, p.y * c), math.sqrt(rad2))

    return SliceSet(region, f"ball({Quaternion.coerce(center).to_json()}, {radius})")


def ellipse_union(I=I_UNIT) -> SliceSet:
    """x^2 + y^2 / dist(J, C_I) < 1 on C_J, and the unit disk on C_I itself."""
    I = as_unit(I)

    def region(J):
        d = dist_to_slice(J, I)
        return Disk(0j, 1.0) if d == 0.0 else Ellipse(0j, 1.0, math.sqrt(d))

    return SliceSet(region, "ellipse_union")


def omega_set(I=I_UNIT, arc_points: int = cx.ARC_POINTS) -> SliceSet:
    """The union of the upper half-slices C_J^+ with gamma_T(J) removed."""
    I = as_unit(I)

    def region(J):
        return Intersection((CutComplement(cx.t_of(J, I), False, arc_points), CutComplement(cx.t_of(-J, I), True, arc_points)))

    return SliceSet(region, "omega")


def axially_symmetric(region: Region, name: str = "axially_symmetric") -> SliceSet:
    """The set whose slice on every unit is ``region`` (pass a conj-symmetric region)."""
    return SliceSet(lambda J: region, name)


def single_slice(I, region: Region) -> SliceSet:
    """A set lying inside C_I; other slices only see its real trace."""
    I = as_unit(I)

    def pick(J):
        if J == I:
            return region
        if J == -I:
            return Reflected(region)
        return RealTrace(region)

    return SliceSet(pick, "single_slice", real_unit=I)


def slice_set_from_json(obj: dict) -> SliceSet:
    kind = obj.get("set")
    if kind == "ball":
        return ball(Quaternion.from_json(obj["center"]), float(obj["radius"]))
    if kind == "ellipse_union":
        return ellipse_union(unit_from_json(obj.get("unit", [1.0, 0.0, 0.0])))
    if kind == "omega":
        return omega_set(unit_from_json(obj.get("unit", [1.0, 0.0, 0.0])))
    if kind == "axially_symmetric":
        return axially_symmetric(region_from_json(obj["region"]))
    if kind == "single_slice":
        return single_slice(unit_from_json(obj["unit"]), region_from_json(obj["region"]))
    if kind in ("union", "intersection"):
        sets = [slice_set_from_json(o) for o in obj["sets"]]
        out = sets[0]
        for s in sets[1:]:
            out = out | s if kind == "union" else out & s
        return out
    raise ValueError(f"unknown slice set {kind!r}")


# --- completion ------------------------------------------------------------


def completion_witness(S: SliceSet, x: float, y: float, units: Sequence) -> ImaginaryUnit | None:
    """A sampled K with x + |y| K in S, or None."""
    y = abs(y)
    for K in units:
        K = as_unit(K)
        reg = S.region(K)
        if reg.contains(complex(x, y)):
            return K
        if reg.contains(complex(x, -y)):
            return -K
    return None


@dataclass(frozen=True, eq=False)
class _CompletionRegion(Region):
    S: SliceSet
    units: tuple[ImaginaryUnit, ...]

    def contains(self, z):
        z = _z(z)
        out = np.zeros(z.shape, dtype=bool)
        w = z.real + 1j * np.abs(z.imag)
        for K in self.units:
            reg = self.S.region(K)
            out |= reg.contains(w) | reg.contains(np.conj(w))
            if out.all():
                break
        return out

    def clearance(self, z):
        # a disk around x + |y|K inside S stays inside the completion after folding
        z = _z(z)
        w = z.real + 1j * np.abs(z.imag)
        out = np.zeros(z.shape)
        for K in self.units:
            reg = self.S.region(K)
            out = np.maximum(out, np.maximum(reg.clearance(w), reg.clearance(np.conj(w))))
        return out


def axially_symmetric_completion(S: SliceSet, units: Sequence) -> SliceSet:
    """Union of the spheres x + y S over sampled points x + yK of S."""
    units = tuple(as_unit(u) for u in units)
    reg = _CompletionRegion(S, units)
    return SliceSet(lambda J: reg, f"completion({S.name})")


# --- predicates ------------------------------------------------------------


@dataclass
class OpennessReport:
    units: list
    min_clearance: list
    witness_points: list
    member_counts: list

    @property
    def passed(self) -> bool:
        return all(c > 0.0 for c in self.min_clearance)

    @property
    def failing_slices(self) -> list[int]:
        return [k for k, c in enumerate(self.min_clearance) if not c > 0.0]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "slices": [
                {
                    "unit": unit_to_json(u),
                    "min_clearance": float(c),
                    "witness_point": None if w is None else [w.real, w.imag],
                    "members": int(m),
                }
                for u, c, w, m in zip(self.units, self.min_clearance, self.witness_points, self.member_counts)
            ],
        }


def _slice_samples(reg: Region, n: int, extent) -> np.ndarray:
    box = reg.bbox() or extent
    x0, x1, y0, y1 = box
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-12)
    m = max(2, int(math.isqrt(n)))
    gx, gy = np.meshgrid(np.linspace(x0 - pad, x1 + pad, m), np.linspace(y0 - pad, y1 + pad, m))
    return np.concatenate([(gx + 1j * gy).ravel(), reg.boundary(max(8, m))])


def is_slice_open_sampled(
    S: SliceSet,
    units: Sequence,
    points_per_slice: int = 256,
    extent=DEFAULT_EXTENT,
) -> OpennessReport:
    """Per slice, the smallest certified disk radius around sampled members."""
    units = [as_unit(u) for u in units]
    mins, wits, counts = [], [], []
    for J in units:
        reg = S.region(J)
        z = _slice_samples(reg, points_per_slice, extent)
        member = reg.contains(z)
        if not np.any(member):
            mins.append(math.inf)
            wits.append(None)
            counts.append(0)
            continue
        c = reg.clearance(z[member])
        k = int(np.argmin(c))
        mins.append(float(c[k]))
        wits.append(complex(z[member][k]))
        counts.append(int(member.sum()))
    return OpennessReport(units, mins, wits, counts)


def approach_units(I=I_UNIT, max_power: int = 60) -> list[ImaginaryUnit]:
    """Units cos(phi) I + sin(phi) Jp with phi = 2^-m, m = 1..max_power."""
    I = as_unit(I)
    Jp = perpendicular_unit(I)
    out = []
    for m in range(1, max_power + 1):
        phi = 2.0 ** -m
        out.append(ImaginaryUnit.from_vector(math.cos(phi) * I.vector + math.sin(phi) * Jp.vector, normalize=True))
    return out


@dataclass(frozen=True)
class BallEscape:
    radius: float
    unit: ImaginaryUnit | None
    point: Quaternion | None

    @property
    def escaped(self) -> bool:
        return self.unit is not None

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "escaped": self.escaped,
            "unit": None if self.unit is None else unit_to_json(self.unit),
            "point": None if self.point is None else self.point.to_json(),
        }


def euclidean_ball_escape(S: SliceSet, center, radius: float, units: Sequence) -> BallEscape:
    """Look for center + (radius/2) J outside S; a hit means B(center, radius) is not inside S."""
    c = Quaternion.coerce(center)
    for J in units:
        J = as_unit(J)
        q = c + J * (0.5 * radius)
        if not S.contains(q):
            return BallEscape(radius, J, q)
    return BallEscape(radius, None, None)


@dataclass
class RealConnectivity:
    connected: bool
    intervals: list

    def to_json(self) -> dict:
        return {"connected": self.connected, "intervals": self.intervals}


def real_trace(S: SliceSet, resolution: int = 4001, extent: tuple[float, float] = (-10.0, 10.0)):
    """Sample points of R and their membership in S."""
    xs = np.linspace(extent[0], extent[1], resolution)
    return xs, S.region(S.real_unit).contains(xs.astype(complex))


def is_real_connected(S: SliceSet, resolution: int = 4001, extent: tuple[float, float] = (-10.0, 10.0)) -> RealConnectivity:
    """S intersected with R, sampled, has at most one interval component."""
    xs, mask = real_trace(S, resolution, extent)
    edges = np.diff(mask.astype(int))
    starts = list(np.flatnonzero(edges == 1) + 1)
    ends = list(np.flatnonzero(edges == -1))
    if mask[0]:
        starts.insert(0, 0)
    if mask[-1]:
        ends.append(len(mask) - 1)
    intervals = [[float(xs[a]), float(xs[b])] for a, b in zip(starts, ends)]
    return RealConnectivity(len(intervals) <= 1, intervals)


def real_trace_consistent(S: SliceSet, units: Sequence, xs) -> bool:
    """Membership of real points agrees through every unit's description."""
    xs = np.asarray(xs, dtype=float).astype(complex)
    ref = S.region(S.real_unit).contains(xs)
    return all(np.array_equal(S.region(as_unit(J)).contains(xs), ref) for J in units)


@dataclass
class ComponentReport:
    units: list
    counts: list
    meets_real: list  # per slice, one flag per component
    extent: tuple
    grid: int

    @property
    def pieces_avoid_real(self) -> list[bool]:
        return [not any(flags) for flags in self.meets_real]

    def to_json(self) -> dict:
        return {
            "extent": list(self.extent),
            "grid": self.grid,
            "slices": [
                {
                    "unit": unit_to_json(u),
                    "components": int(n),
                    "meets_real": [bool(f) for f in flags],
                }
                for u, n, flags in zip(self.units, self.counts, self.meets_real)
            ],
        }


def slice_components(
    S: SliceSet,
    units: Sequence,
    grid: int = DEFAULT_GRID,
    extent=DEFAULT_EXTENT,
) -> ComponentReport:
    """Connected components of S on each slice, from a grid x grid pixel mask."""
    units = [as_unit(u) for u in units]
    x0, x1, y0, y1 = extent
    xs = np.linspace(x0, x1, grid)
    ys = np.linspace(y0, y1, grid)
    gx, gy = np.meshgrid(xs, ys)
    z = gx + 1j * gy
    dy = (y1 - y0) / max(grid - 1, 1)
    near_real = np.abs(ys) <= 0.5 * dy
    counts, meets = [], []
    for J in units:
        reg = S.region(J)
        mask = reg.contains(z)
        labels, n = ndimage.label(mask)
        real_rows = labels[near_real]
        # a component meets R when it owns a pixel on the axis row and the axis point itself is a member
        axis_member = reg.contains(np.tile(xs, (int(near_real.sum()), 1)).astype(complex))
        hit = set(np.unique(real_rows[(real_rows > 0) & axis_member]).tolist())
        counts.append(n)
        meets.append([k in hit for k in range(1, n + 1)])
    return ComponentReport(units, counts, meets, tuple(extent), grid)
