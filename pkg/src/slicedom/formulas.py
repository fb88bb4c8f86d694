"""Extension and representation formulas, splitting, and slice regular oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import qlinalg
from .errors import (
    DegenerateSlices,
    EvaluationOutsideDomain,
    NotFullSliceRank,
    NotOrthogonal,
    ShapeMismatch,
    SliceDomError,
)
from .qlinalg import QMatrix
from .quaternion import EPS_UNIT, Quaternion, as_unit, embed, qmul
from .slice_calculus import UnitMatrix, full_slice_rank, mmat, unit_tuple, zeta

EXP_TERMS = 40


@dataclass(frozen=True)
class SliceValueVector:
    """Values f(gamma^{J_r}(1)) for the 2^N rows of a unit matrix."""

    N: int
    values: tuple[Quaternion, ...]

    def __post_init__(self):
        vals = tuple(Quaternion.coerce(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != 2 ** self.N:
            raise ShapeMismatch(f"N={self.N} needs {2 ** self.N} values, got {len(vals)}")

    @property
    def array(self) -> np.ndarray:
        return np.array([v.array for v in self.values])

    def to_json(self) -> dict:
        return {"N": self.N, "values": [v.to_json() for v in self.values]}

    @classmethod
    def from_json(cls, obj: dict) -> SliceValueVector:
        return cls(int(obj["N"]), tuple(Quaternion.from_json(v) for v in obj["values"]))


@dataclass(frozen=True)
class SlicePolynomial:
    """q -> sum_k q^k a_k with left powers and right coefficients."""

    coeffs: tuple[Quaternion, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Quaternion.coerce(c) for c in self.coeffs))

    @classmethod
    def exp(cls, scale=1.0, terms: int = EXP_TERMS) -> SlicePolynomial:
        """Truncated exponential series, q -> exp(q) * scale."""
        s = Quaternion.coerce(scale)
        return cls(tuple(s / math.factorial(k) for k in range(terms)))

    @classmethod
    def random(cls, rng: np.random.Generator, degree: int) -> SlicePolynomial:
        return cls(tuple(Quaternion.from_array(rng.standard_normal(4)) for _ in range(degree + 1)))

    @property
    def array(self) -> np.ndarray:
        return np.array([c.array for c in self.coeffs])

    def __call__(self, q) -> Quaternion:
        return eval_slice_polynomial(self, q)

    def to_json(self) -> dict:
        return {"coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> SlicePolynomial:
        return cls(tuple(Quaternion.from_json(c) for c in obj["coeffs"]))


def eval_slice_polynomial(p: SlicePolynomial, q) -> Quaternion:
    q = Quaternion.coerce(q)
    acc = Quaternion()
    for a in reversed(p.coeffs):  # Horner: a0 + q(a1 + q(a2 + ...))
        acc = q * acc + a
    return acc


def _two_slice_coefficients(I1, I2, J) -> tuple[Quaternion, Quaternion]:
    I1, I2, J = as_unit(I1), as_unit(I2), as_unit(J)
    d = I1 - I2
    if d.norm() <= EPS_UNIT:
        raise DegenerateSlices("the two slices must use distinct units")
    dinv = d.inverse()
    c1 = dinv * I1 + J * dinv
    c2 = (-dinv) * I2 + J * (-dinv)
    return c1, c2


def extend_two_slices(v1, v2, I1, I2, J) -> Quaternion:
    """Value at x + yJ of the slice regular extension of data on the slices I1, I2.

    ``v1``, ``v2`` are the values at x + y I1 and x + y I2 with y >= 0.
    """
    c1, c2 = _two_slice_coefficients(I1, I2, J)
    J = as_unit(J)
    if J == as_unit(I1):  # the coefficients collapse to (1, 0); skip the roundoff
        return Quaternion.coerce(v1)
    if J == as_unit(I2):
        return Quaternion.coerce(v2)
    return c1 * Quaternion.coerce(v1) + c2 * Quaternion.coerce(v2)


def extension_function(f1: Callable, f2: Callable, I1, I2, J) -> Callable:
    """q in C_J^+ -> extension built from holomorphic samplers f1 on C_I1, f2 on C_I2.

    The samplers take complex slice coordinates ``x + y*1j``.
    """
    J = as_unit(J)
    _two_slice_coefficients(I1, I2, J)  # fail early on degenerate slices

    def F(q):
        q = Quaternion.coerce(q)
        y = q.x * J.x + q.y * J.y + q.z * J.z
        if y < 0:
            raise EvaluationOutsideDomain("the extension formula is only used on y >= 0")
        z = complex(q.w, y)
        return extend_two_slices(f1(z), f2(z), I1, I2, J)

    return F


def _check_represent(K, J: UnitMatrix, F: SliceValueVector):
    K = unit_tuple(K)
    if len(K) != J.N:
        raise ShapeMismatch(f"unit tuple has length {len(K)}, unit matrix has N={J.N}")
    if F.N != J.N:
        raise ShapeMismatch(f"value vector has N={F.N}, unit matrix has N={J.N}")
    rep = full_slice_rank(J)
    if not rep.full:
        raise NotFullSliceRank(
            f"unit matrix lacks full slice-rank at level {rep.failing_level}",
            level=rep.failing_level,
        )
    return K


def represent(K, J: UnitMatrix, F: SliceValueVector) -> Quaternion:
    """zeta(K) M(J)^-1 F, via one linear solve."""
    K = _check_represent(K, J, F)
    C = qlinalg.solve(mmat(J), QMatrix.column(F.array))
    return Quaternion.from_array(np.sum(qmul(zeta(K), C.data[:, 0, :]), axis=0))


def represent_many(Ks: Sequence, J: UnitMatrix, F: SliceValueVector) -> list[Quaternion]:
    """Representation formula for a sweep of unit tuples, reusing M(J)^-1."""
    Ks = [_check_represent(K, J, F) for K in Ks]
    C = (qlinalg.inverse(mmat(J)) @ QMatrix.column(F.array)).data[:, 0, :]
    return [Quaternion.from_array(np.sum(qmul(zeta(K), C), axis=0)) for K in Ks]


def represent_condition(J: UnitMatrix) -> float:
    """2-norm condition number of chi(M(J)); reported, never used to extrapolate."""
    return float(np.linalg.cond(qlinalg.adjoint_complex(mmat(J))))


def classical_repr(K, J1, J2, v1, v2) -> Quaternion:
    """(J1-J2)^-1 [J1 v1 - J2 v2] + K (J1-J2)^-1 [v1 - v2]."""
    K, J1, J2 = as_unit(K), as_unit(J1), as_unit(J2)
    v1, v2 = Quaternion.coerce(v1), Quaternion.coerce(v2)
    d = J1 - J2
    if d.norm() <= EPS_UNIT:
        raise DegenerateSlices("J1 and J2 must differ")
    dinv = d.inverse()
    return dinv * (J1 * v1 - J2 * v2) + K * (dinv * (v1 - v2))


def split_value(q, I, Jp) -> tuple[Quaternion, Quaternion]:
    """Write q = F + G Jp with F, G in C_I (I orthogonal to Jp)."""
    q, I, Jp = Quaternion.coerce(q), as_unit(I), as_unit(Jp)
    if abs(float(np.dot(I.vector, Jp.vector))) > EPS_UNIT:
        raise NotOrthogonal("split_value needs I orthogonal to Jp")
    IJ = I * Jp
    qa = q.array
    F = Quaternion(qa[0]) + I * float(np.dot(qa, I.array))
    G = Quaternion(float(np.dot(qa, Jp.array))) + I * float(np.dot(qa, IJ.array))
    return F, G


def cr_residual(f: Callable, I, z: complex, h: float) -> float:
    """Central-difference estimate of |1/2 (d/dx + I d/dy) f| at x + yI."""
    if h <= 0:
        raise ValueError("step h must be positive")
    I = as_unit(I)
    z = complex(z)
    try:
        fxp = Quaternion.coerce(f(embed(z + h, I)))
        fxm = Quaternion.coerce(f(embed(z - h, I)))
        fyp = Quaternion.coerce(f(embed(z + 1j * h, I)))
        fym = Quaternion.coerce(f(embed(z - 1j * h, I)))
    except SliceDomError as exc:
        raise EvaluationOutsideDomain(f"sampler failed near {z}: {exc}") from exc
    dx = (fxp - fxm) / (2.0 * h)
    dy = (fyp - fym) / (2.0 * h)
    return (0.5 * (dx + I * dy)).norm()
