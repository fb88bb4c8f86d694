"""The zeta map, the signed antidiagonal sigma_N, M(J), D_N(J) and full slice-rank."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qlinalg
from .errors import ShapeMismatch, SizeCap
from .qlinalg import QMatrix
from .quaternion import (
    RENORM_EVERY,
    ImaginaryUnit,
    as_unit,
    qmul,
    random_units,
    unit_from_json,
    unit_to_json,
)

MAX_N = 12


def _check_n(N: int) -> None:
    if N < 1:
        raise ValueError("N must be at least 1")
    if N > MAX_N:
        raise SizeCap(f"N={N} exceeds the cap N <= {MAX_N} (2^N growth)")


def unit_tuple(units: Sequence) -> tuple[ImaginaryUnit, ...]:
    out = tuple(as_unit(u) for u in units)
    if not out:
        raise ValueError("a unit tuple needs at least one unit")
    return out


@dataclass(frozen=True)
class UnitMatrix:
    """A 2^N x N array of imaginary units; row r is the tuple J_r."""

    rows: tuple[tuple[ImaginaryUnit, ...], ...]

    def __post_init__(self):
        rows = tuple(unit_tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        n = len(rows[0]) if rows else 0
        _check_n(n)
        if len(rows) != 2 ** n or any(len(r) != n for r in rows):
            raise ShapeMismatch(f"a unit matrix with N={n} needs {2 ** n} rows of length {n}")

    @property
    def N(self) -> int:
        return len(self.rows[0])

    def level(self, l: int) -> UnitMatrix:
        """J^(l): the first 2^l rows and first l columns."""
        if not 1 <= l <= self.N:
            raise ValueError(f"level {l} outside 1..{self.N}")
        return UnitMatrix(tuple(r[:l] for r in self.rows[: 2 ** l]))

    def column(self, j: int) -> list[ImaginaryUnit]:
        return [r[j] for r in self.rows]

    def to_json(self) -> dict:
        return {"N": self.N, "rows": [[unit_to_json(u) for u in r] for r in self.rows]}

    @classmethod
    def from_json(cls, obj: dict) -> UnitMatrix:
        m = cls(tuple(tuple(unit_from_json(u) for u in r) for r in obj["rows"]))
        if "N" in obj and int(obj["N"]) != m.N:
            raise ShapeMismatch(f"declared N={obj['N']} but rows have length {m.N}")
        return m

    @classmethod
    def random(cls, rng: np.random.Generator, N: int) -> UnitMatrix:
        _check_n(N)
        return cls(tuple(tuple(random_units(rng, N)) for _ in range(2 ** N)))


def zeta(K: Sequence) -> np.ndarray:
    """zeta(K) as a (2^N, 4) array.

    Component m (1-based) is the ordered product over the binary digits of m-1,
    (K_N K_{N-1})^{m_N} ... (K_2 K_1)^{m_2} (K_1)^{m_1}, with m_1 least significant.
    """
    K = unit_tuple(K)
    _check_n(len(K))
    units = np.array([u.array for u in K])
    vec = np.array([[1.0, 0.0, 0.0, 0.0]])
    prev = np.array([1.0, 0.0, 0.0, 0.0])
    for level, u in enumerate(units, start=1):
        factor = qmul(u, prev)  # K_l K_{l-1}, with K_0 = 1
        vec = np.concatenate([vec, qmul(factor, vec)])
        if level % RENORM_EVERY == 0:
            vec /= np.linalg.norm(vec, axis=1, keepdims=True)
        prev = u
    return vec


def sigma(N: int) -> np.ndarray:
    """Signed antidiagonal integer matrix: entry (r, c) = (-1)^(N+c) when r + c = 2^N + 1."""
    _check_n(N)
    n = 2 ** N
    s = np.zeros((n, n), dtype=np.int64)
    c = np.arange(1, n + 1)
    r = n + 1 - c
    s[r - 1, c - 1] = np.where((N + c) % 2 == 0, 1, -1)
    return s


def _sigma_signs(N: int) -> np.ndarray:
    c = np.arange(1, 2 ** N + 1)
    return np.where((N + c) % 2 == 0, 1.0, -1.0)


def right_sigma(vec: np.ndarray, N: int) -> np.ndarray:
    """v sigma_N for a row of quaternions, by index arithmetic: (v sigma)_c = v_{2^N+1-c} (-1)^(N+c)."""
    return vec[::-1] * _sigma_signs(N)[:, None]


def left_sigma(X: np.ndarray, N: int) -> np.ndarray:
    """sigma_N X acting on the row index of a (2^N, ..., 4) array."""
    # row r of sigma X is sigma_{r, c*} X_{c*} with c* = 2^N + 1 - r
    signs = _sigma_signs(N)[::-1]
    return X[::-1] * signs.reshape((-1,) + (1,) * (X.ndim - 1))


def mmat(J: UnitMatrix) -> QMatrix:
    """M(J): row r is zeta(J_r)."""
    return QMatrix(np.stack([zeta(r) for r in J.rows]))


def dmat(J: UnitMatrix) -> QMatrix:
    """D_N(J) = diag of the last column of J."""
    return QMatrix.diag(J.column(J.N - 1))


@dataclass(frozen=True)
class SliceRankReport:
    full: bool
    margins: tuple[float, ...]  # log10 det margin of M(J^(l)), l = 1..N
    invertible: tuple[bool, ...]

    @property
    def failing_level(self) -> int | None:
        for l, ok in enumerate(self.invertible, start=1):
            if not ok:
                return l
        return None

    def to_json(self) -> dict:
        return {
            "full_slice_rank": self.full,
            "levels": [
                {"level": l, "log10_det_margin": m, "invertible": ok}
                for l, (m, ok) in enumerate(zip(self.margins, self.invertible), start=1)
            ],
        }


def full_slice_rank(J: UnitMatrix, tol_det: float = qlinalg.TOL_DET) -> SliceRankReport:
    margins, oks = [], []
    for l in range(1, J.N + 1):
        M = mmat(J.level(l))
        m = qlinalg.det_margin(M)
        margins.append(m)
        oks.append(bool(m > np.log10(tol_det)))
    return SliceRankReport(all(oks), tuple(margins), tuple(oks))


def random_full_rank(rng: np.random.Generator, N: int, tries: int = 100) -> UnitMatrix:
    for _ in range(tries):
        J = UnitMatrix.random(rng, N)
        if full_slice_rank(J).full:
            return J
    raise RuntimeError(f"no full slice-rank matrix found in {tries} draws")


def verify_intertwine(K: Sequence) -> float:
    """max |K_N zeta(K) - zeta(K) sigma_N| over components."""
    K = unit_tuple(K)
    z = zeta(K)
    lhs = qmul(K[-1].array, z)
    rhs = right_sigma(z, len(K))
    return float(np.max(np.linalg.norm(lhs - rhs, axis=-1)))


def verify_conjugation(J: UnitMatrix) -> float:
    """max-norm of sigma_N M(J)^-1 - M(J)^-1 D_N(J); raises Singular if M(J) is singular."""
    Minv = qlinalg.inverse(mmat(J))
    lhs = left_sigma(Minv.data, J.N)
    rhs = (Minv @ dmat(J)).data
    return float(np.max(np.linalg.norm(lhs - rhs, axis=-1)))
