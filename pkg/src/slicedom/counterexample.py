"""A domain Omega whose axially symmetric completion carries no slice regular extension.

Planar coordinates z = x + iy always mean the point x + yI of the base slice.
The cut gamma_s runs from 2i around a half circle (upper for s = 0, lower for
s = 1, linearly interpolated in between) to -2 + 2i and then left along the
horizontal ray. On slice J the function is the branch of log(z - 2i) on the
complement of gamma_{T(J)}, normalised to 0 at 1 + 2i.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .continuation import ContinuationOptions, DEFAULT_OPTIONS, continue_along, log_germ, monodromy_gap
from .errors import HorizonExceeded, OnCut, ParameterOutOfRange, SliceDomError
from .paths import PlanarPath, Segment
from .quaternion import (
    I_UNIT,
    ImaginaryUnit,
    Quaternion,
    as_unit,
    dist_to_slice,
    embed,
    sample_sphere,
    unit_from_json,
    unit_to_json,
)

T_MAX = 0.999
CUT_CLEARANCE = 1e-3
ARC_POINTS = 2048
BRANCH_POINT = 2j
BASE_POINT = 1 + 2j
DETOUR_DISTANCE = 3.0


def gamma_planar(s: float, t):
    """gamma_s(t) as a complex coordinate; vectorised over t."""
    if not 0.0 <= s <= 1.0:
        raise ParameterOutOfRange(f"family parameter s must lie in [0, 1], got {s}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(np.isnan(t)):
        raise ParameterOutOfRange(f"cut parameter must be non-negative, got {t}")
    if np.any(t > T_MAX):
        raise HorizonExceeded(f"cut parameter {np.max(t):.6g} beyond the horizon t_max = {T_MAX}")
    theta = 2.0 * np.pi * np.minimum(t, 0.5)
    arc = -1.0 + np.cos(theta) + 1j * (2.0 + (1.0 - 2.0 * s) * np.sin(theta))
    with np.errstate(divide="ignore"):
        ray = 2j - 1.0 / (1.0 - np.maximum(t, 0.5))
    out = np.where(t <= 0.5, arc, ray)
    return out if out.ndim else complex(out)


def gamma_s(s: float, t: float, I=I_UNIT) -> Quaternion:
    """The interpolated cut point gamma_s(t) inside C_I."""
    return embed(complex(gamma_planar(s, t)), I)


def t_of(J, I=I_UNIT) -> float:
    """min(|J - I|, 1)."""
    return min((as_unit(J) - as_unit(I)).norm(), 1.0)


@dataclass(frozen=True)
class CutFamily:
    """The family s -> gamma_s in the slice of ``unit``."""

    unit: ImaginaryUnit = I_UNIT
    arc_points: int = ARC_POINTS

    def __call__(self, s: float, t: float) -> Quaternion:
        return gamma_s(s, t, self.unit)

    def polyline(self, s: float) -> np.ndarray:
        return cut_polyline(s, self.arc_points)

    def parameter(self, J) -> float:
        return t_of(J, self.unit)


@lru_cache(maxsize=4096)
def _cut_polyline_cached(s: float, n_arc: int) -> np.ndarray:
    t = np.linspace(0.0, 0.5, n_arc)
    pts = np.append(gamma_planar(s, t), complex(gamma_planar(s, T_MAX)))
    pts.setflags(write=False)
    return pts


def cut_polyline(s: float, n_arc: int = ARC_POINTS) -> np.ndarray:
    """Vertices of gamma_s: a dense arc polyline followed by the exact ray end."""
    return _cut_polyline_cached(float(s), int(n_arc))


def _segments(poly: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return poly[:-1], poly[1:]


def dist_to_polyline(z, poly: np.ndarray, chunk: int = 1 << 16) -> np.ndarray:
    """Euclidean distance from each planar point to a polyline."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    A, B = _segments(poly)
    AB = B - A
    L2 = np.abs(AB) ** 2
    L2 = np.where(L2 == 0.0, 1.0, L2)
    out = np.empty(z.shape, dtype=float)
    flat, res = z.ravel(), out.ravel()
    step = max(1, chunk // len(A))
    for k in range(0, len(flat), step):
        p = flat[k : k + step, None]
        u = np.clip(((p - A) * np.conj(AB)).real / L2, 0.0, 1.0)
        res[k : k + step] = np.min(np.abs(p - (A + u * AB)), axis=1)
    return out


def dist_to_ray(z) -> np.ndarray:
    """Distance to the ideal horizontal ray {x + 2i : x <= -2}, which is unbounded."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    corner = -2.0 + 2.0j
    return np.where(z.real <= corner.real, np.abs(z.imag - 2.0), np.abs(z - corner))


def dist_to_cut(z, s: float, n_arc: int = ARC_POINTS) -> np.ndarray:
    """Distance to the ideal cut gamma_s: polyline arc plus the exact unbounded ray."""
    arc = cut_polyline(s, n_arc)[:-1]
    return np.minimum(dist_to_polyline(z, arc), dist_to_ray(z))


def arc_sagitta(n_arc: int = ARC_POINTS) -> float:
    """Bound on how far the arc polyline strays from the true arc.

    The arc is an affine image (contraction) of a circle arc sampled at angle
    steps pi / (n_arc - 1), so the circle's chord sagitta bounds the error.
    """
    return 1.0 - math.cos(0.5 * math.pi / (n_arc - 1))


def certified_clearance(z, s: float, n_arc: int = ARC_POINTS) -> np.ndarray:
    """A lower bound for the true distance to the ideal cut."""
    return np.maximum(dist_to_cut(z, s, n_arc) - arc_sagitta(n_arc), 0.0)


def on_cut(z, s: float, tol: float = 1e-12) -> np.ndarray:
    """Exact membership in the ideal cut gamma_s (closed ray and arc)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    x, y = z.real, z.imag
    h = np.sqrt(np.clip(1.0 - (x + 1.0) ** 2, 0.0, None))
    arc = (x >= -2.0 - tol) & (x <= tol) & (np.abs(y - 2.0 - (1.0 - 2.0 * s) * h) <= tol)
    ray = (x <= -2.0) & (np.abs(y - 2.0) <= tol)
    return arc | ray


def _cross(a, b):
    return a.real * b.imag - a.imag * b.real


def segment_hits_polyline(p: complex, q: complex, poly: np.ndarray, touch: float = 1e-9) -> bool:
    """True when the segment [p, q] meets the polyline (touching counts)."""
    A, B = _segments(poly)
    d = q - p
    o1 = _cross(d, A - p)
    o2 = _cross(d, B - p)
    o3 = _cross(B - A, p - A)
    o4 = _cross(B - A, q - A)
    if np.any((o1 * o2 < 0) & (o3 * o4 < 0)):
        return True
    if np.min(dist_to_polyline(np.array([p, q]), poly)) <= touch:
        return True
    ends = np.concatenate([A, poly[-1:]])
    return bool(np.min(dist_to_polyline(ends, np.array([p, q]))) <= touch)


def _detour_levels(poly: np.ndarray) -> tuple[float, float, float]:
    return (
        float(poly.imag.max()) + DETOUR_DISTANCE,
        float(poly.imag.min()) - DETOUR_DISTANCE,
        float(poly.real.max()) + DETOUR_DISTANCE,
    )


def plan_route(a: complex, b: complex, s: float, n_arc: int = ARC_POINTS) -> list[complex]:
    """Waypoints from a to b whose segments avoid gamma_s.

    Tries the straight segment, then two-segment detours through points at
    distance >= 3 from the cut's bounding box, then three-segment detours.
    """
    poly = cut_polyline(s, n_arc)
    up, down, right = _detour_levels(poly)

    def clear(route):
        return all(not segment_hits_polyline(p, q, poly) for p, q in zip(route, route[1:]))

    if clear([a, b]):
        return [a, b]
    waypoints = [complex(x, y) for y in (up, down) for x in (b.real, a.real, right)]
    waypoints += [complex(right, b.imag), complex(right, a.imag)]
    two = sorted(([a, w, b] for w in waypoints), key=_route_length)
    for route in two:
        if clear(route):
            return route
    three = [[a, complex(right, y), complex(b.real, y), b] for y in (up, down)]
    three += [[a, complex(a.real, y), complex(b.real, y), b] for y in (up, down)]
    for route in sorted(three, key=_route_length):
        if clear(route):
            return route
    raise OnCut(f"no cut-avoiding route from {a} to {b}")


def _route_length(route) -> float:
    return float(sum(abs(q - p) for p, q in zip(route, route[1:])))


def _route_path(route) -> PlanarPath:
    return PlanarPath(tuple(Segment(p, q) for p, q in zip(route, route[1:]) if p != q) or (Segment(route[0], route[0]),))


def f_cut(
    tcut: float,
    z,
    I=I_UNIT,
    clearance: float = CUT_CLEARANCE,
    opts: ContinuationOptions = DEFAULT_OPTIONS,
) -> Quaternion:
    """The branch of log(. - 2I) on C_I minus gamma_tcut with value 0 at 1 + 2I."""
    I = as_unit(I)
    z = complex(z)
    horizon = complex(gamma_planar(tcut, T_MAX)).real
    if z.real <= horizon + 1.0:
        raise HorizonExceeded(f"point {z} lies beyond the truncated cut end at x = {horizon:.6g}")
    gap = float(dist_to_cut(z, tcut)[0])
    if gap <= clearance:
        raise OnCut(f"point {z} is within {gap:.3g} of the cut gamma_{tcut:g}")
    route = plan_route(BASE_POINT, z, tcut)
    germ = log_germ(BASE_POINT, BRANCH_POINT, unit=I, value=0.0)
    germ = continue_along(germ, _route_path(route), opts)
    return germ.value


def F_plus(J, x: float, y: float, I=I_UNIT, clearance: float = CUT_CLEARANCE) -> Quaternion:
    """(1 - JI)/2 f_T(J)(x + yI) + (1 + JI)/2 f_T(J)(x - yI) at the point x + yJ."""
    if y < 0:
        raise ParameterOutOfRange("F_plus is defined on the closed upper half-plane y >= 0")
    J, I = as_unit(J), as_unit(I)
    s = t_of(J, I)
    JI = J * I
    a = f_cut(s, complex(x, y), I, clearance)
    b = a if y == 0 else f_cut(s, complex(x, -y), I, clearance)
    return (1.0 - JI) * 0.5 * a + (1.0 + JI) * 0.5 * b


# --- report ----------------------------------------------------------------


@dataclass
class CounterexampleConfig:
    unit: list = field(default_factory=lambda: [1.0, 0.0, 0.0])
    n_circle: int = 256
    n_units: int = 512
    scheme: str = "fibonacci"
    seed: int = 0
    probe_center: list = field(default_factory=lambda: [0.0, 2.0])
    probe_radius: float = 1.0
    cut_clearance: float = CUT_CLEARANCE
    arc_points: int = ARC_POINTS
    openness_units: int = 32
    openness_grid: int = 16
    openness_box: list = field(default_factory=lambda: [-4.0, 3.0, -4.0, 5.0])

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> CounterexampleConfig:
        known = {k: obj[k] for k in cls.__dataclass_fields__ if k in obj}
        unknown = set(obj) - set(known)
        if unknown:
            raise ValueError(f"unknown counterexample config keys: {sorted(unknown)}")
        return cls(**known)


@dataclass
class CounterexampleReport:
    config: CounterexampleConfig
    probe_circle: np.ndarray
    witnesses: list
    witness_clearance: np.ndarray
    monodromy: Quaternion | None
    monodromy_error: str | None
    openness: np.ndarray
    unit_rows: list = field(repr=False, default_factory=list)

    @property
    def failures(self) -> list[int]:
        return [k for k, w in enumerate(self.witnesses) if w is None]

    @property
    def coverage_complete(self) -> bool:
        return not self.failures

    @property
    def monodromy_abs(self) -> float:
        return math.nan if self.monodromy is None else self.monodromy.norm()

    @property
    def openness_pass(self) -> bool:
        return bool(np.all(self.openness > 0.0))

    @property
    def obstruction(self) -> bool:
        """Coverage complete and |gap| = 2 pi within 1e-4."""
        return self.coverage_complete and abs(self.monodromy_abs - 2.0 * math.pi) <= 1e-4

    def to_json(self) -> dict:
        m = self.monodromy
        return {
            "config": self.config.to_json(),
            "probe_circle": [[float(z.real), float(z.imag)] for z in self.probe_circle],
            "witnesses": [None if w is None else unit_to_json(w) for w in self.witnesses],
            "witness_clearance": [float(c) for c in self.witness_clearance],
            "failures": self.failures,
            "coverage_complete": self.coverage_complete,
            "monodromy": None if m is None else m.to_json(),
            "monodromy_abs": None if m is None else self.monodromy_abs,
            "monodromy_error": self.monodromy_error,
            "obstruction": self.obstruction,
            "openness": [float(c) for c in self.openness],
            "openness_pass": self.openness_pass,
        }

    def sweep_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "jx", "jy", "jz", "t_of_j", "dist_to_slice", "points_witnessed"])
        for row in self.unit_rows:
            w.writerow([row[0]] + [repr(float(v)) for v in row[1:6]] + [row[6]])
        return buf.getvalue()


def _units(cfg: CounterexampleConfig, n: int) -> list[ImaginaryUnit]:
    return sample_sphere(n, cfg.scheme, cfg.seed)


def slice_clearance(z, J, I, n_arc: int = ARC_POINTS) -> np.ndarray:
    """Distance in C_J from x + yJ to the excluded set gamma_T(J) union conj(gamma_T(-J))."""
    J, I = as_unit(J), as_unit(I)
    z = np.asarray(z, dtype=complex)
    up = certified_clearance(z, t_of(J, I), n_arc)
    down = certified_clearance(np.conj(z), t_of(-J, I), n_arc)
    return np.minimum(up, down)


def counterexample_report(cfg: CounterexampleConfig | None = None) -> CounterexampleReport:
    cfg = cfg or CounterexampleConfig()
    I = unit_from_json(cfg.unit)
    units = _units(cfg, cfg.n_units)
    center = complex(*cfg.probe_center)
    theta = 2.0 * np.pi * np.arange(cfg.n_circle) / cfg.n_circle
    circle = center + cfg.probe_radius * np.exp(1j * theta)
    pts = circle.real + 1j * np.abs(circle.imag)  # x + |y| S is the same sphere

    # (b) witness search: J works when (x, |y|) avoids gamma_T(J) with margin
    dist = np.empty((len(units), len(pts)))
    for k, J in enumerate(units):
        dist[k] = dist_to_cut(pts, t_of(J, I), cfg.arc_points)
    ok = dist > cfg.cut_clearance
    witnesses, clearances = [], np.full(len(pts), np.nan)
    for m in range(len(pts)):
        hits = np.flatnonzero(ok[:, m])
        if len(hits):
            witnesses.append(units[hits[0]])
            clearances[m] = dist[hits[0], m]
        else:
            witnesses.append(None)
    rows = [
        (k, J.x, J.y, J.z, t_of(J, I), dist_to_slice(J, I), int(ok[k].sum()))
        for k, J in enumerate(units)
    ]

    # (c) monodromy of the log germ around the probe circle
    mono, err = None, None
    try:
        z0 = complex(circle[0])
        germ = log_germ(z0, BRANCH_POINT, unit=I)
        mono = monodromy_gap(germ, PlanarPath.circle(center, cfg.probe_radius))
    except SliceDomError as exc:
        err = f"{type(exc).__name__}: {exc}"

    # (a) openness: clearance of sampled member points from the excluded set, per slice
    x0, x1, y0, y1 = cfg.openness_box
    gx, gy = np.meshgrid(np.linspace(x0, x1, cfg.openness_grid), np.linspace(y0, y1, cfg.openness_grid))
    grid = (gx + 1j * gy).ravel()
    openness = []
    for J in _units(cfg, cfg.openness_units):
        c = slice_clearance(grid, J, I, cfg.arc_points)
        members = ~(on_cut(grid, t_of(J, I)) | on_cut(np.conj(grid), t_of(-J, I)))
        openness.append(float(c[members].min()) if np.any(members) else 0.0)

    return CounterexampleReport(cfg, circle, witnesses, clearances, mono, err, np.array(openness), rows)
