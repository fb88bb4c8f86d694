"""Reference implementations that share no code path with slicedom.

Quaternions here are plain 4-tuples multiplied through 2x2 complex matrices
(q = a + b j  ->  [[a, b], [-conj(b), conj(a)]]); matrix inversion goes
through the 4n x 4n real left-multiplication representation.
"""

import cmath
import math

import numpy as np


def to_c2(q):
    w, x, y, z = q
    a, b = complex(w, x), complex(y, z)
    return np.array([[a, b], [-b.conjugate(), a.conjugate()]])


def from_c2(m):
    a, b = m[0, 0], m[0, 1]
    return (a.real, a.imag, b.real, b.imag)


def mul(p, q):
    return from_c2(to_c2(p) @ to_c2(q))


def add(p, q):
    return tuple(a + b for a, b in zip(p, q))


def sub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def scale(p, s):
    return tuple(a * s for a in p)


def norm(p):
    return math.sqrt(sum(a * a for a in p))


def inv(p):
    n2 = sum(a * a for a in p)
    return (p[0] / n2, -p[1] / n2, -p[2] / n2, -p[3] / n2)


def embed(z, u):
    return (z.real, z.imag * u[0], z.imag * u[1], z.imag * u[2])


def unit(v):
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    return (0.0, float(v[0]), float(v[1]), float(v[2]))


def power(q, k):
    out = (1.0, 0.0, 0.0, 0.0)
    for _ in range(k):
        out = mul(q, out)
    return out


def poly_eval(coeffs, q):
    """sum_k q^k a_k, powers computed one by one (no Horner)."""
    acc = (0.0, 0.0, 0.0, 0.0)
    for k, a in enumerate(coeffs):
        acc = add(acc, mul(power(q, k), a))
    return acc


def zeta(units):
    """Component m is prod_{l=N..1} (K_l K_{l-1})^{m_l}, m_l the binary digits of m-1."""
    N = len(units)
    pairs = [mul(units[l], units[l - 1]) if l else units[0] for l in range(N)]
    out = []
    for m in range(2 ** N):
        acc = (1.0, 0.0, 0.0, 0.0)
        for l in range(N - 1, -1, -1):
            if (m >> l) & 1:
                acc = mul(acc, pairs[l])
        out.append(acc)
    return out


def left_matrix(q):
    """Real 4x4 matrix of p -> q p."""
    cols = [mul(q, e) for e in np.eye(4)]
    return np.array(cols).T


def qmat_real(A):
    """(n, n, 4) quaternion matrix -> 4n x 4n real matrix of left action."""
    n, m = A.shape[:2]
    R = np.zeros((4 * n, 4 * m))
    for r in range(n):
        for c in range(m):
            R[4 * r : 4 * r + 4, 4 * c : 4 * c + 4] = left_matrix(tuple(A[r, c]))
    return R


def qmat_from_real(R):
    n, m = R.shape[0] // 4, R.shape[1] // 4
    return np.array([[R[4 * r : 4 * r + 4, 4 * c] for c in range(m)] for r in range(n)])


def qmat_inverse(A):
    return qmat_from_real(np.linalg.inv(qmat_real(A)))


def qmat_mul(A, B):
    return qmat_from_real(qmat_real(A) @ qmat_real(B))


def tracked_log(points, branch, start_value):
    """Continuous log(z - branch) along a densely sampled path, from a start value."""
    w = np.asarray(points) - branch
    dtheta = np.angle(w[1:] / w[:-1])
    return start_value + math.log(abs(w[-1]) / abs(w[0])) + 1j * float(np.sum(dtheta))


def principal_log(z):
    return cmath.log(z)
