"""Planar paths, N-part paths with real junctions, and their liftings into H."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BrokenJunction, LengthMismatch, ParameterOutOfRange
from .quaternion import ImaginaryUnit, Quaternion, as_unit, embed, unit_from_json, unit_to_json

EPS_JUNCTION = 1e-9


def _check_t(t):
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0.0) or np.any(ta > 1.0) or np.any(np.isnan(ta)):
        raise ParameterOutOfRange(f"path parameter must lie in [0, 1], got {t}")
    return ta


def _cx(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _cx_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


class Leg:
    """A continuous map [0, 1] -> C, evaluated on numpy arrays."""

    def __call__(self, t):
        raise NotImplementedError

    def to_json(self) -> dict:
        raise TypeError(f"{type(self).__name__} has no JSON form")


@dataclass(frozen=True)
class Segment(Leg):
    start: complex
    end: complex

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.start + (self.end - self.start) * t

    def to_json(self):
        return {"kind": "segment", "start": _cx_json(self.start), "end": _cx_json(self.end)}


@dataclass(frozen=True)
class Arc(Leg):
    """center + radius * exp(i (start_angle + span t)); angles in radians."""

    center: complex
    radius: float
    start_angle: float
    span: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.center + self.radius * np.exp(1j * (self.start_angle + self.span * t))

    def to_json(self):
        return {
            "kind": "arc",
            "center": _cx_json(self.center),
            "radius": self.radius,
            "start_angle": self.start_angle,
            "span": self.span,
        }


@dataclass(frozen=True)
class Polyline(Leg):
    """Piecewise linear through ``points`` at parameters ``params`` (uniform by default)."""

    points: tuple[complex, ...]
    params: tuple[float, ...] | None = None

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if len(pts) < 2:
            raise ValueError("a polyline needs at least two points")
        object.__setattr__(self, "points", pts)
        if self.params is not None:
            ps = tuple(float(p) for p in self.params)
            if len(ps) != len(pts) or ps[0] != 0.0 or ps[-1] != 1.0 or any(np.diff(ps) <= 0):
                raise ValueError("polyline params must increase from 0 to 1, one per point")
            object.__setattr__(self, "params", ps)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        grid = np.linspace(0.0, 1.0, len(self.points)) if self.params is None else np.array(self.params)
        pts = np.array(self.points)
        return np.interp(t, grid, pts.real) + 1j * np.interp(t, grid, pts.imag)

    def to_json(self):
        out = {"kind": "polyline", "points": [_cx_json(p) for p in self.points]}
        if self.params is not None:
            out["params"] = list(self.params)
        return out


@dataclass(frozen=True)
class FunctionLeg(Leg):
    """An analytic generator given as a vectorised callable; not serialisable."""

    fn: Callable
    name: str = "function"

    def __call__(self, t):
        return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=complex)


@dataclass(frozen=True)
class SubLeg(Leg):
    """s -> path(a + (b - a) s)."""

    path: "PlanarPath"
    a: float
    b: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.path(self.a + (self.b - self.a) * t)

    def to_json(self):
        return {"kind": "sub", "path": self.path.to_json(), "a": self.a, "b": self.b}


def leg_from_json(obj: dict) -> Leg:
    kind = obj.get("kind")
    if kind == "segment":
        return Segment(_cx(obj["start"]), _cx(obj["end"]))
    if kind == "arc":
        return Arc(_cx(obj["center"]), float(obj["radius"]), float(obj["start_angle"]), float(obj["span"]))
    if kind == "polyline":
        params = obj.get("params")
        return Polyline(tuple(_cx(p) for p in obj["points"]), None if params is None else tuple(params))
    if kind == "sub":
        return SubLeg(PlanarPath.from_json(obj["path"]), float(obj["a"]), float(obj["b"]))
    raise ValueError(f"unknown leg kind {kind!r}")


@dataclass(frozen=True)
class PlanarPath:
    """Concatenation of legs, leg k running over [k/L, (k+1)/L]."""

    legs: tuple[Leg, ...]

    def __post_init__(self):
        legs = tuple(self.legs)
        if not legs:
            raise ValueError("a path needs at least one leg")
        object.__setattr__(self, "legs", legs)
        for a, b in zip(legs, legs[1:]):
            if abs(complex(a(1.0)) - complex(b(0.0))) > EPS_JUNCTION:
                raise BrokenJunction("consecutive legs of a planar path must meet")

    @classmethod
    def of(cls, *legs: Leg) -> PlanarPath:
        return cls(tuple(legs))

    @classmethod
    def segment(cls, a, b) -> PlanarPath:
        return cls((Segment(complex(a), complex(b)),))

    @classmethod
    def circle(cls, center, radius, start_angle=0.0, turns=1.0) -> PlanarPath:
        return cls((Arc(complex(center), float(radius), float(start_angle), 2.0 * math.pi * turns),))

    @classmethod
    def constant(cls, z) -> PlanarPath:
        return cls.segment(z, z)

    def __call__(self, t):
        ta = _check_t(t)
        L = len(self.legs)
        scaled = ta * L
        idx = np.minimum(np.floor(scaled).astype(int), L - 1)
        local = scaled - idx
        out = np.empty(ta.shape, dtype=complex)
        for k, leg in enumerate(self.legs):
            mask = idx == k
            if np.any(mask):
                out[mask] = leg(local[mask])
        return out if out.ndim else complex(out)

    @property
    def start(self) -> complex:
        return complex(self.legs[0](0.0))

    @property
    def end(self) -> complex:
        return complex(self.legs[-1](1.0))

    def sample(self, n: int) -> np.ndarray:
        return self(np.linspace(0.0, 1.0, n))

    def reversed(self) -> PlanarPath:
        return PlanarPath((FunctionLeg(lambda t: self(1.0 - np.asarray(t)), "reversed"),))

    def sub(self, a: float, b: float) -> PlanarPath:
        return PlanarPath((SubLeg(self, float(a), float(b)),))

    def then(self, other: PlanarPath) -> PlanarPath:
        return PlanarPath((SubLeg(self, 0.0, 1.0), SubLeg(other, 0.0, 1.0)))

    def to_json(self) -> dict:
        return {"legs": [leg.to_json() for leg in self.legs]}

    @classmethod
    def from_json(cls, obj) -> PlanarPath:
        if isinstance(obj, list):
            return cls(tuple(leg_from_json(o) for o in obj))
        if "legs" in obj:
            return cls(tuple(leg_from_json(o) for o in obj["legs"]))
        return cls((leg_from_json(obj),))


def _validate_junctions(parts: Sequence[PlanarPath]) -> None:
    for k, (a, b) in enumerate(zip(parts, parts[1:]), start=1):
        end, start = a.end, b.start
        if abs(end.imag) > EPS_JUNCTION:
            raise BrokenJunction(f"junction {k} at {end} is not real")
        if abs(end - start) > EPS_JUNCTION:
            raise BrokenJunction(f"part {k} ends at {end} but part {k + 1} starts at {start}")


@dataclass(frozen=True)
class NPartPath:
    """(gamma_1, ..., gamma_N) with gamma_k(1) = gamma_{k+1}(0) real."""

    parts: tuple[PlanarPath, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("an N-part path needs at least one part")
        object.__setattr__(self, "parts", parts)
        _validate_junctions(parts)

    @property
    def N(self) -> int:
        return len(self.parts)

    @property
    def start(self) -> complex:
        return self.parts[0].start

    @property
    def end(self) -> complex:
        return self.parts[-1].end

    def eval(self, t: float) -> complex:
        return _piecewise(self.parts, t)

    __call__ = eval

    def truncate(self, t: float, side: str = "closed") -> NPartPath:
        if not 0.0 < t <= 1.0:
            raise ParameterOutOfRange(f"truncation parameter must lie in (0, 1], got {t}")
        if t == 1.0:
            return self
        Nt = self.N * t
        m = math.floor(Nt)
        frac = Nt - m
        if frac == 0.0:
            if side == "left":
                return NPartPath(self.parts[:m])
            if side != "closed":
                raise ValueError(f"unknown truncation side {side!r}")
            return NPartPath(self.parts[:m] + (PlanarPath.constant(self.eval(t)),))
        if side not in ("closed", "left"):
            raise ValueError(f"unknown truncation side {side!r}")
        return NPartPath(self.parts[:m] + (self.parts[m].sub(0.0, frac),))

    def lift(self, units: Sequence) -> QPath:
        return lift(self, units)

    def to_json(self) -> dict:
        return {"parts": [p.to_json() for p in self.parts]}

    @classmethod
    def from_json(cls, obj) -> NPartPath:
        parts = obj["parts"] if isinstance(obj, dict) else obj
        return cls(tuple(PlanarPath.from_json(p) for p in parts))


def _piecewise(parts, t: float):
    t = float(_check_t(t))
    N = len(parts)
    if t == 1.0:
        return parts[-1].end
    k = math.floor(t * N)
    return parts[k](t * N - k)


def compose(parts: Sequence[PlanarPath]) -> NPartPath:
    return NPartPath(tuple(parts))


@dataclass(frozen=True)
class QPath:
    """A finite-part path in H; leg k lies in the slice of ``units[k]``."""

    parts: tuple[PlanarPath, ...]
    units: tuple[ImaginaryUnit, ...] = field(default=())

    def __post_init__(self):
        if len(self.parts) != len(self.units):
            raise LengthMismatch("a QPath needs one unit per part")
        object.__setattr__(self, "units", tuple(as_unit(u) for u in self.units))
        _validate_junctions(self.parts)

    @property
    def N(self) -> int:
        return len(self.parts)

    def eval(self, t: float) -> Quaternion:
        t = float(_check_t(t))
        N = self.N
        if t == 1.0:
            return embed(self.parts[-1].end, self.units[-1])
        k = math.floor(t * N)
        return embed(self.parts[k](t * N - k), self.units[k])

    __call__ = eval

    @property
    def end(self) -> Quaternion:
        return self.eval(1.0)

    def junctions(self) -> list[Quaternion]:
        return [embed(p.end, u) for p, u in zip(self.parts[:-1], self.units[:-1])]

    def to_json(self) -> dict:
        return {
            "parts": [p.to_json() for p in self.parts],
            "units": [unit_to_json(u) for u in self.units],
        }

    @classmethod
    def from_json(cls, obj: dict) -> QPath:
        return cls(
            tuple(PlanarPath.from_json(p) for p in obj["parts"]),
            tuple(unit_from_json(u) for u in obj["units"]),
        )


def lift(g: NPartPath, units: Sequence) -> QPath:
    """The lifting sending part k into the slice C_{I_k}."""
    units = tuple(as_unit(u) for u in units)
    if len(units) != g.N:
        raise LengthMismatch(f"{len(units)} units for a {g.N}-part path")
    return QPath(g.parts, units)
