import math

import numpy as np
import pytest
from hypothesis import given

import oracles
from strategies import quaternions, units
from slicedom.errors import NotAUnit
from slicedom.quaternion import (
    I_UNIT,
    J_UNIT,
    K_UNIT,
    ImaginaryUnit,
    Quaternion,
    decompose,
    dist_to_slice,
    embed,
    inverse,
    mul,
    perpendicular_unit,
    sample_sphere,
    unit_from_json,
    unit_product,
    unit_to_json,
)


def test_defining_relations():
    assert mul(I_UNIT, J_UNIT) == K_UNIT
    assert J_UNIT * K_UNIT == I_UNIT
    assert K_UNIT * I_UNIT == J_UNIT
    assert J_UNIT * I_UNIT == -K_UNIT
    assert I_UNIT * I_UNIT == Quaternion(-1.0)


def test_identity_and_hand_expansion():
    q = Quaternion(0.3, -1.2, 2.5, 4.0)
    assert q * Quaternion(1.0) == q
    # (1 + i)(1 + j) = 1 + i + j + k
    assert Quaternion(1, 1, 0, 0) * Quaternion(1, 0, 1, 0) == Quaternion(1, 1, 1, 1)


def test_inverse_examples():
    assert inverse(I_UNIT) == -I_UNIT
    assert inverse(Quaternion(2.0)) == Quaternion(0.5)
    assert inverse(Quaternion(1, 1, 1, 1)).isclose(Quaternion(0.25, -0.25, -0.25, -0.25), 1e-15)
    with pytest.raises(ZeroDivisionError):
        inverse(Quaternion())


@given(quaternions, quaternions)
def test_mul_matches_complex_matrix_oracle(p, q):
    ref = oracles.mul(p.to_json(), q.to_json())
    assert np.allclose((p * q).array, ref, atol=1e-12 * (1 + p.norm() * q.norm()))


@given(quaternions, quaternions)
def test_norm_is_multiplicative(p, q):
    assert abs((p * q).norm() - p.norm() * q.norm()) <= 1e-12 * (1 + p.norm() * q.norm())


@given(quaternions, quaternions, quaternions)
def test_associative(p, q, r):
    lhs, rhs = (p * q) * r, p * (q * r)
    assert lhs.isclose(rhs, 1e-11 * (1 + p.norm() * q.norm() * r.norm()))


@given(quaternions)
def test_conj_times_q_is_norm_squared(q):
    c = q.conj() * q
    assert abs(c.w - q.norm() ** 2) <= 1e-12 * (1 + q.norm() ** 2)
    assert c.imag.norm() <= 1e-12 * (1 + q.norm() ** 2)


@given(units())
def test_units_square_to_minus_one(u):
    assert (u * u + 1.0).norm() <= 1e-12


def test_unit_invariants_are_named():
    with pytest.raises(NotAUnit) as e:
        ImaginaryUnit(0.1, 1.0, 0.0, 0.0)
    assert e.value.invariant == "ImaginaryUnit.purity"
    with pytest.raises(NotAUnit) as e:
        ImaginaryUnit(0.0, 2.0, 0.0, 0.0)
    assert e.value.invariant == "ImaginaryUnit.norm"


def test_embed_examples():
    assert embed(1 + 2j, J_UNIT) == Quaternion(1, 0, 2, 0)
    assert embed(3.0, K_UNIT) == Quaternion(3.0)
    assert embed(1j, K_UNIT) == K_UNIT


def test_decompose_examples():
    p = decompose(Quaternion(1, 0, 2, 0))
    assert (p.x, p.y, p.unit) == (1.0, 2.0, J_UNIT)
    p = decompose(Quaternion(3.0))
    assert (p.x, p.y, p.unit) == (3.0, 0.0, None)
    p = decompose(Quaternion(1, 0, -2, 0))
    assert (p.x, p.y) == (1.0, 2.0) and p.unit == -J_UNIT


@given(units(), quaternions)
def test_decompose_embed_roundtrip(u, q):
    z = complex(q.w, abs(q.x) + 0.1)
    p = decompose(embed(z, u))
    assert abs(p.x - z.real) <= 1e-12 and abs(p.y - z.imag) <= 1e-12
    assert (p.unit - u).norm() <= 1e-12
    assert p.reassemble().isclose(embed(z, u), 1e-12)


@given(units(), quaternions)
def test_embed_commutes_with_conjugation(u, q):
    z = complex(q.w, q.x)
    assert embed(z.conjugate(), u) == embed(z, u).conj()


def test_sample_sphere():
    assert sample_sphere(1, "grid") == [I_UNIT]
    for u in sample_sphere(200, "fibonacci"):
        assert abs(u.w) == 0.0 and abs(u.norm() - 1.0) <= 1e-12
    assert sample_sphere(100, "random", 7) == sample_sphere(100, "random", 7)
    assert sample_sphere(50, "grid") == sample_sphere(50, "grid")
    with pytest.raises(ValueError):
        sample_sphere(0)


def test_dist_to_slice_examples():
    assert dist_to_slice(I_UNIT, I_UNIT) == 0.0
    assert dist_to_slice(-I_UNIT, I_UNIT) == 0.0
    assert dist_to_slice(J_UNIT, I_UNIT) == 1.0
    phi = 2.0 ** -40
    J = ImaginaryUnit.from_vector([math.cos(phi), math.sin(phi), 0.0], normalize=True)
    assert dist_to_slice(J, I_UNIT) == pytest.approx(phi, rel=1e-12)


@given(units())
def test_perpendicular_unit(u):
    p = perpendicular_unit(u)
    assert abs(float(np.dot(p.vector, u.vector))) <= 1e-12


def test_unit_product_stays_on_sphere():
    units_ = sample_sphere(300, "random", 3)
    q = unit_product(units_)
    assert abs(q.norm() - 1.0) <= 1e-12


def test_json_roundtrip():
    q = Quaternion(1.5, -2.0, 0.25, 3.0)
    assert Quaternion.from_json(q.to_json()) == q
    u = sample_sphere(5, "random", 1)[3]
    assert unit_from_json(unit_to_json(u)) == u
