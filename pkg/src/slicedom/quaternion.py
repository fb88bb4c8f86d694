"""Quaternion arithmetic, imaginary units and slice coordinates.

Scalars are :class:`Quaternion` values; bulk work (matrices, power series)
uses ``(..., 4)`` float arrays with the same ``[w, x, y, z]`` layout and the
vectorised helpers :func:`qmul` and :func:`qconj`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NotAUnit

EPS_UNIT = 1e-12
EPS_ZERO = 1e-150
RENORM_EVERY = 64


def qmul(a, b):
    """Hamilton product of quaternion arrays, broadcasting over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def qconj(a):
    a = np.array(a, dtype=float)
    a[..., 1:] *= -1.0
    return a


@dataclass(frozen=True, eq=False)
class Quaternion:
    """An element w + x i + y j + z k of the quaternions."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> Quaternion:
        w, x, y, z = (float(v) for v in np.asarray(a, dtype=float).reshape(4))
        return cls(w, x, y, z)

    @classmethod
    def from_json(cls, data: Sequence[float]) -> Quaternion:
        if len(data) != 4:
            raise ValueError(f"quaternion JSON must have 4 entries, got {len(data)}")
        return cls(*(float(v) for v in data))

    @classmethod
    def coerce(cls, value) -> Quaternion:
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, (int, float, np.floating, np.integer)):
            return Quaternion(float(value))
        return cls.from_array(value)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def to_json(self) -> list[float]:
        return [self.w, self.x, self.y, self.z]

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> Quaternion:
        return Quaternion(0.0, self.x, self.y, self.z)

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)

    __abs__ = norm

    def inverse(self) -> Quaternion:
        n2 = self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
        if math.sqrt(n2) <= EPS_ZERO:
            raise ZeroDivisionError("quaternion inverse of (numerically) zero")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    def __add__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            s = float(other)
            return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * (1.0 / float(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return (self.w, self.x, self.y, self.z) == (other.w, other.x, other.y, other.z)

    def __hash__(self):
        return hash((self.w, self.x, self.y, self.z))

    def isclose(self, other, tol: float = 1e-12) -> bool:
        return (self - Quaternion.coerce(other)).norm() <= tol

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


def _maybe(value):
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Quaternion(float(value))
    return None


@dataclass(frozen=True, eq=False)
class ImaginaryUnit(Quaternion):
    """A purely imaginary quaternion of norm one, i.e. a square root of -1."""

    def __post_init__(self):
        if abs(self.w) > EPS_UNIT:
            raise NotAUnit(
                f"real part {self.w:.3e} exceeds {EPS_UNIT:g}", invariant="ImaginaryUnit.purity"
            )
        n = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if abs(n - 1.0) > EPS_UNIT:
            raise NotAUnit(f"norm {n!r} differs from 1", invariant="ImaginaryUnit.norm")

    @classmethod
    def from_vector(cls, v, normalize: bool = False) -> ImaginaryUnit:
        x, y, z = (float(c) for c in np.asarray(v, dtype=float).reshape(3))
        if normalize:
            n = math.sqrt(x * x + y * y + z * z)
            if n <= EPS_ZERO:
                raise NotAUnit("cannot normalise the zero vector", invariant="ImaginaryUnit.norm")
            x, y, z = x / n, y / n, z / n
        return cls(0.0, x, y, z)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __repr__(self):
        return f"ImaginaryUnit({self.x!r}, {self.y!r}, {self.z!r})"


ONE = Quaternion(1.0)
I_UNIT = ImaginaryUnit(0.0, 1.0, 0.0, 0.0)
J_UNIT = ImaginaryUnit(0.0, 0.0, 1.0, 0.0)
K_UNIT = ImaginaryUnit(0.0, 0.0, 0.0, 1.0)


def as_unit(q) -> ImaginaryUnit:
    """Validate ``q`` as an imaginary unit (accepts quaternions, 3- or 4-vectors)."""
    if isinstance(q, ImaginaryUnit):
        return q
    if isinstance(q, Quaternion):
        return ImaginaryUnit(q.w, q.x, q.y, q.z)
    a = np.asarray(q, dtype=float).reshape(-1)
    if a.size == 3:
        return ImaginaryUnit(0.0, *(float(v) for v in a))
    return ImaginaryUnit(*(float(v) for v in a))


def unit_to_json(u: ImaginaryUnit) -> list[float]:
    return [u.x, u.y, u.z]


def unit_from_json(data) -> ImaginaryUnit:
    return as_unit(data)


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    return Quaternion(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )


def inverse(q: Quaternion) -> Quaternion:
    return Quaternion.coerce(q).inverse()


def unit_product(factors: Iterable[Quaternion]) -> Quaternion:
    """Ordered product of unit quaternions, renormalised every 64 factors."""
    acc = ONE
    for n, f in enumerate(factors, start=1):
        acc = acc * f
        if n % RENORM_EVERY == 0:
            acc = acc / acc.norm()
    return acc


def embed(z: complex, unit) -> Quaternion:
    """The slice embedding x + y i  ->  x + y I."""
    z = complex(z)
    u = as_unit(unit)
    return Quaternion(z.real, z.imag * u.x, z.imag * u.y, z.imag * u.z)


@dataclass(frozen=True)
class SlicePoint:
    """Slice coordinates of a quaternion; ``unit is None`` marks a real point."""

    x: float
    y: float
    unit: ImaginaryUnit | None

    def reassemble(self) -> Quaternion:
        if self.unit is None:
            return Quaternion(self.x)
        return Quaternion(self.x, self.y * self.unit.x, self.y * self.unit.y, self.y * self.unit.z)


def decompose(q) -> SlicePoint:
    q = Quaternion.coerce(q)
    y = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    if y <= EPS_UNIT:
        return SlicePoint(q.w, 0.0, None)
    return SlicePoint(q.w, y, ImaginaryUnit(0.0, q.x / y, q.y / y, q.z / y))


def dist_to_slice(J, I) -> float:
    """Euclidean distance in R^4 from the unit ``J`` to the plane C_I."""
    J = as_unit(J)
    I = as_unit(I)
    c = J.x * I.x + J.y * I.y + J.z * I.z
    r = J.vector - c * I.vector
    return float(np.linalg.norm(r))


def perpendicular_unit(unit) -> ImaginaryUnit:
    """A deterministic unit orthogonal to ``unit``."""
    v = as_unit(unit).vector
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(v)))] = 1.0
    w = np.cross(v, axis)
    return ImaginaryUnit.from_vector(w, normalize=True)


def _grid_vectors(n: int) -> np.ndarray:
    # latitude rings ordered outward from the equator; first point is +i
    rings = max(1, math.ceil(math.sqrt(n / 2.0)))
    per_ring = math.ceil(n / rings)
    order = sorted(range(rings), key=lambda a: (abs(a - (rings - 1) / 2.0), a))
    pts = []
    for a in order:
        theta = math.pi * (a + 0.5) / rings
        for b in range(per_ring):
            phi = 2.0 * math.pi * b / per_ring
            pts.append((math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)))
    v = np.array(pts[:n])
    v[np.abs(v) < 1e-15] = 0.0  # cos(pi/2) and friends: keep the equator exact
    return v


def _fibonacci_vectors(n: int) -> np.ndarray:
    golden = (1.0 + 5.0 ** 0.5) / 2.0
    idx = np.arange(n)
    theta = 2.0 * np.pi * idx / golden
    phi = np.arccos(1.0 - 2.0 * (idx + 0.5) / n)
    return np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=-1)


def sample_sphere(n: int, scheme: str = "fibonacci", seed: int | None = None) -> list[ImaginaryUnit]:
    """Deterministic samples of the sphere of imaginary units.

    ``scheme`` is ``"grid"``, ``"fibonacci"`` or ``"random"`` (seeded through
    ``numpy.random.default_rng``).
    """
    if n < 1:
        raise ValueError("sample_sphere needs n >= 1")
    if scheme == "grid":
        v = _grid_vectors(n)
    elif scheme == "fibonacci":
        v = _fibonacci_vectors(n)
    elif scheme == "random":
        rng = np.random.default_rng(seed)
        v = rng.standard_normal((n, 3))
    else:
        raise ValueError(f"unknown sphere sampling scheme {scheme!r}")
    v = v / np.linalg.norm(v, axis=1, keepdims=True)
    return [ImaginaryUnit.from_vector(row, normalize=True) for row in v]


def random_units(rng: np.random.Generator, n: int) -> list[ImaginaryUnit]:
    v = rng.standard_normal((n, 3))
    return [ImaginaryUnit.from_vector(row, normalize=True) for row in v]


def random_quaternion(rng: np.random.Generator, scale: float = 1.0) -> Quaternion:
    return Quaternion.from_array(scale * rng.standard_normal(4))
