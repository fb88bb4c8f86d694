"""Disk-chain analytic continuation of quaternion-valued power series germs.

A germ lives in one slice C_I: the planar coordinate z stands for P_I(z) and
the series is sum_k P_I(z - c)^k a_k with quaternion coefficients on the
right. Splitting every coefficient as a_k = F_k + G_k Jp (F_k, G_k in C_I,
Jp orthogonal to I) turns the series into two complex power series, so
recentring is ordinary complex Taylor shifting.

Recentring carries the value a_0 along the chain by summing the current
series. Higher coefficients come either from a :class:`CoefficientModel`
(a single-valued closed form for the derivative, so multivaluedness lives
only in a_0 and is produced by the chain itself) or, for raw series, from
an exact Taylor shift. A raw truncated series is a polynomial, so it is only
trusted inside the disk it was created on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.special import comb

from .errors import (
    BrokenJunction,
    LengthMismatch,
    SingularityHit,
    TruncationBudgetExceeded,
)
from .formulas import SlicePolynomial
from .paths import EPS_JUNCTION, NPartPath, PlanarPath
from .quaternion import (
    I_UNIT,
    ImaginaryUnit,
    Quaternion,
    as_unit,
    embed,
    perpendicular_unit,
    qmul,
)

DEFAULT_ORDER = 64
ROOT_TAIL = 16


@dataclass(frozen=True)
class ContinuationOptions:
    step_fraction: float = 0.4
    r_min: float = 1e-6
    r_max: float = 1e3
    tol: float = 1e-13
    max_steps: int = 200_000


DEFAULT_OPTIONS = ContinuationOptions()


# --- slice splitting -------------------------------------------------------


def _basis(unit: ImaginaryUnit) -> np.ndarray:
    Jp = perpendicular_unit(unit)
    return np.stack([np.array([1.0, 0, 0, 0]), unit.array, Jp.array, qmul(unit.array, Jp.array)])


def split_series(coeffs: np.ndarray, unit: ImaginaryUnit) -> tuple[np.ndarray, np.ndarray]:
    """Quaternion coefficients -> complex arrays (F, G) with a_k = F_k + G_k Jp."""
    comps = np.asarray(coeffs) @ _basis(unit).T
    return comps[:, 0] + 1j * comps[:, 1], comps[:, 2] + 1j * comps[:, 3]


def join_series(F: np.ndarray, G: np.ndarray, unit: ImaginaryUnit) -> np.ndarray:
    comps = np.stack([F.real, F.imag, G.real, G.imag], axis=-1)
    return comps @ _basis(unit)


def embed_array(z: np.ndarray, unit: ImaginaryUnit) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.stack([z.real, z.imag * unit.x, z.imag * unit.y, z.imag * unit.z], axis=-1)


def taylor_shift(a: np.ndarray, d: complex) -> np.ndarray:
    """Coefficients about c + d of the polynomial sum_k a_k (z - c)^k."""
    M = len(a) - 1
    k = np.arange(M + 1)
    diff = k[None, :] - k[:, None]
    powers = np.zeros(M + 1, dtype=complex)
    powers[0] = 1.0
    for m in range(1, M + 1):
        powers[m] = powers[m - 1] * d
    T = np.where(diff >= 0, comb(k[None, :], k[:, None]) * powers[np.clip(diff, 0, M)], 0.0)
    return T @ a


def root_test_radius(coeffs: np.ndarray, safety: float = 0.5, tail: int = ROOT_TAIL) -> float:
    """safety / max_k |a_k|^(1/k) over the last ``tail`` coefficients; inf if they vanish."""
    M = len(coeffs) - 1
    ks = np.arange(max(1, M - tail + 1), M + 1)
    with np.errstate(over="ignore"):  # overflow near a singularity just means radius 0
        mags = np.linalg.norm(np.asarray(coeffs)[ks].reshape(len(ks), -1), axis=-1)
    nz = mags > 0
    if not np.any(nz):
        return math.inf
    rho = np.max(np.exp(np.log(mags[nz]) / ks[nz]))
    return safety / rho


# --- coefficient models ----------------------------------------------------


class CoefficientModel:
    """Closed-form, single-valued Taylor coefficients a_1..a_M about any center.

    Coefficients are complex numbers c_k in the planar coordinate; the
    quaternion coefficient in slice I is P_I(c_k) * scale.
    """

    scale: Quaternion

    def complex_coeffs(self, center: complex, order: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def real_symmetric(self) -> bool:
        """True when coefficients at real centers are real (slice independent)."""
        raise NotImplementedError

    def quaternion_coeffs(self, center: complex, order: int, unit: ImaginaryUnit) -> np.ndarray:
        c = self.complex_coeffs(center, order)
        return qmul(embed_array(c, unit), self.scale.array)


@dataclass(frozen=True)
class LogModel(CoefficientModel):
    """f' = (sum_j w_j / (z - p_j)) * scale, i.e. f = sum_j w_j log(z - p_j) * scale."""

    branch_points: tuple[complex, ...]
    weights: tuple[float, ...] = ()
    scale: Quaternion = Quaternion(1.0)

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.branch_points)
        w = tuple(float(v) for v in self.weights) or (1.0,) * len(pts)
        if len(w) != len(pts):
            raise ValueError("one weight per branch point")
        object.__setattr__(self, "branch_points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "scale", Quaternion.coerce(self.scale))

    def complex_coeffs(self, center, order):
        k = np.arange(1, order + 1)
        out = np.zeros(order, dtype=complex)
        for p, w in zip(self.branch_points, self.weights):
            r = complex(center) - p
            if r == 0:
                raise SingularityHit(f"center {center} is a branch point")
            out += w * (-1.0) ** (k + 1) / (k * r ** k)
        return out

    @property
    def real_symmetric(self):
        pairs = sorted(zip(self.branch_points, self.weights), key=lambda t: (t[0].real, t[0].imag))
        mirrored = sorted(((p.conjugate(), w) for p, w in pairs), key=lambda t: (t[0].real, t[0].imag))
        return all(abs(a[0] - b[0]) <= 1e-12 and a[1] == b[1] for a, b in zip(pairs, mirrored))


@dataclass(frozen=True)
class ReciprocalModel(CoefficientModel):
    """f = scale / (z - pole)."""

    pole: complex
    scale: Quaternion = Quaternion(1.0)

    def __post_init__(self):
        object.__setattr__(self, "pole", complex(self.pole))
        object.__setattr__(self, "scale", Quaternion.coerce(self.scale))

    def complex_coeffs(self, center, order):
        r = complex(center) - self.pole
        if r == 0:
            raise SingularityHit(f"center {center} is the pole")
        k = np.arange(1, order + 1)
        return (-1.0) ** k / r ** (k + 1)

    @property
    def real_symmetric(self):
        return self.pole.imag == 0.0


# --- germs -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HolomorphicGerm:
    """Truncated series sum_k P_unit(z - center)^k a_k, coeffs of shape (M+1, 4)."""

    center: complex
    coeffs: np.ndarray
    unit: ImaginaryUnit = I_UNIT
    model: CoefficientModel | None = None
    trust: tuple[complex, float] | None = None
    radius: float = field(default=math.nan)
    safety: float = 0.5

    def __post_init__(self):
        a = np.array(self.coeffs, dtype=float)
        if a.ndim != 2 or a.shape[1] != 4 or len(a) < 2:
            raise ValueError(f"germ coefficients must have shape (M+1, 4), got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "unit", as_unit(self.unit))
        r = root_test_radius(a, self.safety)
        if self.trust is not None:
            c0, r0 = self.trust
            r = min(r, r0 - abs(self.center - c0))
        object.__setattr__(self, "radius", r)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> Quaternion:
        return Quaternion.from_array(self.coeffs[0])

    @classmethod
    def raw(cls, center, coeffs, unit=I_UNIT, safety: float = 0.5) -> HolomorphicGerm:
        """A germ from explicit coefficients; trusted only on its own disk."""
        a = np.asarray([Quaternion.coerce(c).array for c in coeffs]) if not isinstance(coeffs, np.ndarray) else coeffs
        r = root_test_radius(a, safety)
        trust = None if math.isinf(r) else (complex(center), r)
        return cls(complex(center), a, unit, None, trust, safety=safety)

    @classmethod
    def polynomial(cls, p: SlicePolynomial, center: float = 0.0, order: int = DEFAULT_ORDER) -> HolomorphicGerm:
        """Germ of q -> sum q^k a_k at a real center (coefficients are slice independent)."""
        a = p.array
        if len(a) - 1 > order:
            raise ValueError(f"degree {len(a) - 1} exceeds germ order {order}")
        full = np.zeros((order + 1, 4))
        full[: len(a)] = a
        shifted = np.stack([taylor_shift(full[:, j].astype(complex), float(center)).real for j in range(4)], axis=-1)
        return cls(complex(float(center)), shifted)

    @classmethod
    def from_model(
        cls,
        model: CoefficientModel,
        center,
        value,
        unit=I_UNIT,
        order: int = DEFAULT_ORDER,
        safety: float = 0.5,
    ) -> HolomorphicGerm:
        unit = as_unit(unit)
        a = np.zeros((order + 1, 4))
        a[0] = Quaternion.coerce(value).array
        a[1:] = model.quaternion_coeffs(complex(center), order, unit)
        return cls(complex(center), a, unit, model, None, safety=safety)

    def with_unit(self, unit) -> HolomorphicGerm:
        """Move the germ to another slice; only meaningful at a real center."""
        unit = as_unit(unit)
        if abs(self.center.imag) > EPS_JUNCTION:
            raise BrokenJunction(f"slice change requires a real center, got {self.center}")
        if self.model is not None and not self.model.real_symmetric and unit != self.unit:
            raise ValueError("this coefficient model is not slice independent on the real axis")
        return replace(self, unit=unit)

    def _partial_sums(self, d: complex) -> tuple[np.ndarray, float]:
        F, G = split_series(self.coeffs, self.unit)
        half = self.order // 2
        full = np.array([np.polyval(F[::-1], d), np.polyval(G[::-1], d)])
        part = np.array([np.polyval(F[: half + 1][::-1], d), np.polyval(G[: half + 1][::-1], d)])
        return full, float(np.max(np.abs(full - part)))

    def evaluate(self, z, tol: float | None = None) -> Quaternion:
        """Series value at planar point z (i.e. at P_unit(z))."""
        d = complex(z) - self.center
        if abs(d) > self.radius:
            raise TruncationBudgetExceeded(f"point {z} lies outside the estimated radius {self.radius:.3g}")
        full, err = self._partial_sums(d)
        if tol is not None and err > tol * (1.0 + float(np.max(np.abs(full)))):
            raise TruncationBudgetExceeded(f"truncation error estimate {err:.3g} at {z}")
        return Quaternion.from_array(join_series(full[:1], full[1:], self.unit)[0])

    def recenter(self, new_center, tol: float = DEFAULT_OPTIONS.tol) -> HolomorphicGerm:
        new_center = complex(new_center)
        d = new_center - self.center
        if d == 0:
            return self
        full, err = self._partial_sums(d)
        if err > tol * (1.0 + float(np.max(np.abs(full)))):
            raise TruncationBudgetExceeded(f"truncation error estimate {err:.3g} for step {abs(d):.3g}")
        if self.model is not None:
            a = np.empty_like(self.coeffs)
            a[0] = join_series(full[:1], full[1:], self.unit)[0]
            a[1:] = self.model.quaternion_coeffs(new_center, self.order, self.unit)
            return HolomorphicGerm(new_center, a, self.unit, self.model, None, safety=self.safety)
        if self.trust is not None:
            c0, r0 = self.trust
            if abs(new_center - c0) > r0:
                raise TruncationBudgetExceeded("raw series continued beyond the disk it is trusted on")
        F, G = split_series(self.coeffs, self.unit)
        a = join_series(taylor_shift(F, d), taylor_shift(G, d), self.unit)
        return HolomorphicGerm(new_center, a, self.unit, None, self.trust, safety=self.safety)

    def to_json(self) -> dict:
        return {
            "center": [self.center.real, self.center.imag],
            "unit": [self.unit.x, self.unit.y, self.unit.z],
            "radius": self.radius,
            "coeffs": self.coeffs.tolist(),
        }


def log_germ(center, branch_point=0.0, unit=I_UNIT, scale=1.0, value=None, order: int = DEFAULT_ORDER) -> HolomorphicGerm:
    """Germ of log(z - branch_point) * scale; value defaults to the principal branch."""
    center = complex(center)
    if value is None:
        value = embed(np.log(center - complex(branch_point)), unit) * Quaternion.coerce(scale)
    return HolomorphicGerm.from_model(LogModel((branch_point,), (1.0,), scale), center, value, unit, order)


def reciprocal_germ(center, pole=0.0, unit=I_UNIT, scale=1.0, order: int = DEFAULT_ORDER) -> HolomorphicGerm:
    center = complex(center)
    value = embed(1.0 / (center - complex(pole)), unit) * Quaternion.coerce(scale)
    return HolomorphicGerm.from_model(ReciprocalModel(pole, scale), center, value, unit, order)


# --- continuation ----------------------------------------------------------


def _max_dev(path: PlanarPath, c: complex, t0: float, t1: float, n: int = 17) -> float:
    return float(np.max(np.abs(path(np.linspace(t0, t1, n)) - c)))


def continue_along(
    germ: HolomorphicGerm,
    path: PlanarPath,
    opts: ContinuationOptions = DEFAULT_OPTIONS,
    trace: list | None = None,
) -> HolomorphicGerm:
    """Continue ``germ`` along ``path`` (planar coordinates of the germ's slice)."""
    start = path.start
    if abs(start - germ.center) > 0:
        if abs(start - germ.center) > germ.radius:
            raise TruncationBudgetExceeded("path does not start inside the germ's disk")
        germ = germ.recenter(start, opts.tol)
    t = 0.0
    steps = 0
    while t < 1.0:
        R = min(germ.radius, opts.r_max)
        if R < opts.r_min:
            raise SingularityHit(f"radius estimate {R:.3g} collapsed near {germ.center}")
        step = opts.step_fraction * R
        if _max_dev(path, germ.center, t, 1.0, 65) <= step:
            t_next = 1.0
        else:
            lo, hi = t, 1.0
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if _max_dev(path, germ.center, t, mid) <= step:
                    lo = mid
                else:
                    hi = mid
                if hi - lo < 1e-15:
                    break
            t_next = lo
            if t_next <= t:
                raise SingularityHit(f"no progress along the path at t={t:.6g}")
        germ = germ.recenter(path(t_next), opts.tol)
        t = t_next
        steps += 1
        if trace is not None:
            trace.append(germ.center)
        if steps > opts.max_steps:
            raise TruncationBudgetExceeded(f"more than {opts.max_steps} recentring steps")
    return germ


def continue_npart(
    germ: HolomorphicGerm,
    g: NPartPath,
    units: Sequence,
    opts: ContinuationOptions = DEFAULT_OPTIONS,
) -> Quaternion:
    """Value at the lifted endpoint of ``g`` after continuing part k inside slice units[k]."""
    units = [as_unit(u) for u in units]
    if len(units) != g.N:
        raise LengthMismatch(f"{len(units)} units for a {g.N}-part path")
    if abs(germ.center.imag) > EPS_JUNCTION:
        raise BrokenJunction(f"germ center {germ.center} is not real")
    for part, unit in zip(g.parts, units):
        germ = germ.with_unit(unit)
        germ = continue_along(germ, part, opts)
        if abs(germ.center.imag) > EPS_JUNCTION and part is not g.parts[-1]:
            raise BrokenJunction(f"part ended at non-real point {germ.center}")
        if part is not g.parts[-1]:
            germ = germ.recenter(complex(germ.center.real, 0.0), opts.tol)
    return germ.value


def monodromy_gap(germ: HolomorphicGerm, loop: PlanarPath, opts: ContinuationOptions = DEFAULT_OPTIONS) -> Quaternion:
    """a_0 after continuing around ``loop`` minus the value at its base point."""
    if abs(loop.start - loop.end) > EPS_JUNCTION:
        raise ValueError("monodromy needs a closed loop")
    before = germ.evaluate(loop.start) if loop.start != germ.center else germ.value
    after = continue_along(germ, loop, opts)
    return after.value - before
