"""Dense quaternionic matrices.

Inversion and solving go through the complex adjoint chi(A): each entry
q = a + b j (a, b complex) becomes the 2x2 block [[a, -b], [conj(b), conj(a)]],
which makes chi an injective algebra homomorphism into complex matrices.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeMismatch, Singular, SizeCap
from .quaternion import Quaternion

TOL_DET = 1e-10
MAX_SIZE = 4096


class QMatrix:
    """A rows x cols matrix over the quaternions, stored as a (rows, cols, 4) array."""

    __slots__ = ("_data",)

    def __init__(self, data):
        a = np.array(data, dtype=float)
        if a.ndim != 3 or a.shape[2] != 4:
            raise ShapeMismatch(f"QMatrix data must have shape (rows, cols, 4), got {a.shape}")
        if max(a.shape[0], a.shape[1]) > MAX_SIZE:
            raise SizeCap(f"matrix {a.shape[0]}x{a.shape[1]} exceeds the {MAX_SIZE} cap")
        a.setflags(write=False)
        self._data = a

    @classmethod
    def from_entries(cls, rows) -> QMatrix:
        return cls([[Quaternion.coerce(q).array for q in row] for row in rows])

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        a = np.zeros((n, n, 4))
        a[np.arange(n), np.arange(n), 0] = 1.0
        return cls(a)

    @classmethod
    def diag(cls, entries) -> QMatrix:
        n = len(entries)
        a = np.zeros((n, n, 4))
        for k, q in enumerate(entries):
            a[k, k] = Quaternion.coerce(q).array
        return cls(a)

    @classmethod
    def row(cls, vec) -> QMatrix:
        return cls(np.asarray(vec, dtype=float)[None, :, :])

    @classmethod
    def column(cls, vec) -> QMatrix:
        return cls(np.asarray(vec, dtype=float)[:, None, :])

    @classmethod
    def from_real(cls, m) -> QMatrix:
        m = np.asarray(m, dtype=float)
        a = np.zeros(m.shape + (4,))
        a[..., 0] = m
        return cls(a)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> list[Quaternion]:
        return [Quaternion.from_array(q) for q in self._data.reshape(-1, 4)]

    def __getitem__(self, idx) -> Quaternion:
        i, j = idx
        return Quaternion.from_array(self._data[i, j])

    def __matmul__(self, other: QMatrix) -> QMatrix:
        return matmul(self, other)

    def __add__(self, other: QMatrix) -> QMatrix:
        _same_shape(self, other)
        return QMatrix(self._data + other._data)

    def __sub__(self, other: QMatrix) -> QMatrix:
        _same_shape(self, other)
        return QMatrix(self._data - other._data)

    def __neg__(self) -> QMatrix:
        return QMatrix(-self._data)

    def max_abs(self) -> float:
        """Largest entry modulus."""
        if self._data.size == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self._data, axis=-1)))

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [list(map(float, q)) for q in self._data.reshape(-1, 4)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> QMatrix:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = np.asarray(obj["entries"], dtype=float)
        if entries.shape != (rows * cols, 4):
            raise ShapeMismatch(f"expected {rows * cols} entries of length 4, got {entries.shape}")
        return cls(entries.reshape(rows, cols, 4))

    def __repr__(self):
        return f"QMatrix(rows={self.rows}, cols={self.cols})"


def _same_shape(a: QMatrix, b: QMatrix) -> None:
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {b.shape} differ")


def matmul(A: QMatrix, B: QMatrix) -> QMatrix:
    """Matrix product; entries accumulate Hamilton products a_ik * b_kj."""
    if A.cols != B.rows:
        raise ShapeMismatch(f"cannot multiply {A.shape} by {B.shape}")
    aw, ax, ay, az = np.moveaxis(A.data, -1, 0)
    bw, bx, by, bz = np.moveaxis(B.data, -1, 0)
    out = np.stack(
        [
            aw @ bw - ax @ bx - ay @ by - az @ bz,
            aw @ bx + ax @ bw + ay @ bz - az @ by,
            aw @ by - ax @ bz + ay @ bw + az @ bx,
            aw @ bz + ax @ by - ay @ bx + az @ bw,
        ],
        axis=-1,
    )
    return QMatrix(out)


def adjoint_complex(A: QMatrix) -> np.ndarray:
    """The 2r x 2c complex adjoint; entry (r, c) occupies rows 2r:2r+2, cols 2c:2c+2."""
    d = A.data
    a = d[..., 0] + 1j * d[..., 1]
    b = d[..., 2] + 1j * d[..., 3]
    r, c = A.shape
    out = np.empty((r, 2, c, 2), dtype=complex)
    out[:, 0, :, 0] = a
    out[:, 0, :, 1] = -b
    out[:, 1, :, 0] = np.conj(b)
    out[:, 1, :, 1] = np.conj(a)
    return out.reshape(2 * r, 2 * c)


def from_adjoint(X: np.ndarray) -> QMatrix:
    """Inverse of :func:`adjoint_complex` (reads the first row of every block)."""
    X = np.asarray(X)
    r, c = X.shape[0] // 2, X.shape[1] // 2
    blocks = X.reshape(r, 2, c, 2)
    a = blocks[:, 0, :, 0]
    b = -blocks[:, 0, :, 1]
    return QMatrix(np.stack([a.real, a.imag, b.real, b.imag], axis=-1))


def _require_square(A: QMatrix) -> None:
    if A.rows != A.cols:
        raise ShapeMismatch(f"matrix must be square, got {A.shape}")


def det_margin(A: QMatrix) -> float:
    """log10(|det chi(A)|) - log10(scale(A)); scale is the product of row max-norms.

    Computed in log space, so no overflow cap is needed. ``-inf`` for an exactly
    singular matrix.
    """
    _require_square(A)
    X = adjoint_complex(A)
    row_max = np.max(np.abs(X), axis=1)
    if np.any(row_max == 0.0):
        return float("-inf")
    sign, logdet = np.linalg.slogdet(X)
    if sign == 0:
        return float("-inf")
    return float((logdet - np.sum(np.log(row_max))) / np.log(10.0))


def is_invertible(A: QMatrix, tol_det: float = TOL_DET) -> bool:
    return det_margin(A) > np.log10(tol_det)


def inverse(A: QMatrix, tol_det: float = TOL_DET) -> QMatrix:
    """Two-sided inverse via LU on the complex adjoint."""
    if not is_invertible(A, tol_det):
        raise Singular(f"matrix is numerically singular (log10 det margin {det_margin(A):.3g})")
    return from_adjoint(np.linalg.inv(adjoint_complex(A)))


def solve(A: QMatrix, B: QMatrix, tol_det: float = TOL_DET) -> QMatrix:
    """The X with A X = B."""
    if A.rows != B.rows:
        raise ShapeMismatch(f"cannot solve {A.shape} against {B.shape}")
    if not is_invertible(A, tol_det):
        raise Singular(f"matrix is numerically singular (log10 det margin {det_margin(A):.3g})")
    return from_adjoint(np.linalg.solve(adjoint_complex(A), adjoint_complex(B)))


def random_qmatrix(rng: np.random.Generator, rows: int, cols: int | None = None) -> QMatrix:
    cols = rows if cols is None else cols
    return QMatrix(rng.standard_normal((rows, cols, 4)))
