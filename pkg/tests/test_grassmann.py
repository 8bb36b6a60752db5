import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from superqft import GrassmannElement, GrassmannMorphism, gr_mul, gr_pullback, gr_star
from superqft.errors import DimensionError, InvalidMorphismError, SingularError
from superqft.grassmann import mask_from_indices, reorder_sign

G = GrassmannElement
seeds = st.integers(0, 2**32 - 1)
levels = st.integers(0, 5)


def rand(n, seed, **kw):
    return G.random(n, np.random.default_rng(seed), **kw)


# -- hand-computed values -----------------------------------------------------

def test_generators_anticommute_and_square_to_zero():
    z1, z2 = G.generator(2, 1), G.generator(2, 2)
    assert z1 * z2 == -(z2 * z1)
    assert (z1 * z1).is_zero()
    assert (z1 * z2).coeff((1, 2)) == 1.0
    assert (z2 * z1).coeff((1, 2)) == -1.0


def test_from_terms_sorts_with_sign():
    a = G.from_terms(3, {(3, 1): 2.0, (2, 2): 5.0})
    assert a.coeff((1, 3)) == -2.0
    assert a.coeffs.keys() == {0b101}


def test_mask_and_reorder_sign():
    assert mask_from_indices([2, 1], 2) == (0b11, -1)
    assert mask_from_indices([1, 1], 2)[1] == 0
    assert reorder_sign(0b10, 0b01) == -1
    assert reorder_sign(0b01, 0b10) == 1
    assert reorder_sign(0b01, 0b01) == 0


def test_inverse_closed_form():
    # (1 + ζ1ζ2)^-1 = 1 − ζ1ζ2 and (2 + ζ1)^-1 = 1/2 − ζ1/4
    a = G.from_terms(2, {(): 1.0, (1, 2): 1.0})
    assert a.inverse() == G.from_terms(2, {(): 1.0, (1, 2): -1.0})
    b = G.from_terms(1, {(): 2.0, (1,): 1.0})
    assert b.inverse().allclose(G.from_terms(1, {(): 0.5, (1,): -0.25}), atol=1e-15)


def test_exp_of_nilpotent_even():
    u = G.from_terms(4, {(1, 2): 1.0, (3, 4): 1.0})
    # exp(u) = 1 + u + u²/2 with u² = 2 ζ1ζ2ζ3ζ4
    expect = G.from_terms(4, {(): 1.0, (1, 2): 1.0, (3, 4): 1.0, (1, 2, 3, 4): 1.0})
    assert u.exp().allclose(expect, atol=1e-15)


def test_star_conjugates_coefficients():
    a = G.from_terms(2, {(): 1 + 2j, (1,): 3j}, is_complex=True)
    assert gr_star(a) == G.from_terms(2, {(): 1 - 2j, (1,): -3j}, is_complex=True)


# -- laws ---------------------------------------------------------------------

@given(levels, seeds)
def test_associativity_and_distributivity(n, seed):
    a, b, c = (rand(n, seed + k) for k in range(3))
    assert ((a * b) * c).allclose(a * (b * c), atol=1e-12)
    assert (a * (b + c)).allclose(a * b + a * c, atol=1e-12)
    assert gr_mul(a, b) == a * b


@given(levels, seeds, st.integers(0, 1), st.integers(0, 1))
def test_supercommutativity(n, seed, pa, pb):
    x, y = rand(n, seed, parity=pa), rand(n, seed + 1, parity=pb)
    assert (x * y).allclose((y * x) * (-1) ** (pa * pb), atol=1e-12)


@given(levels, seeds)
def test_odd_elements_square_to_zero(n, seed):
    x = rand(n, seed, parity=1)
    assert (x * x).max_abs() <= 1e-12


@given(levels, seeds)
def test_inverse_is_two_sided(n, seed):
    a = rand(n, seed) + 2.0
    one = G.scalar(n, 1.0)
    assert (a * a.inverse()).allclose(one, atol=1e-12)
    assert (a.inverse() * a).allclose(one, atol=1e-12)


@given(levels, seeds)
def test_star_is_antimultiplicative_involution(n, seed):
    a, b = rand(n, seed, is_complex=True), rand(n, seed + 1, is_complex=True)
    assert gr_star(gr_star(a)) == a
    # conjugation commutes with the (real) Grassmann structure
    assert gr_star(a * b).allclose(gr_star(a) * gr_star(b), atol=1e-12)


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 3), seeds)
def test_morphisms_are_algebra_maps(n, m, k, seed):
    rng = np.random.default_rng(seed)
    lam = GrassmannMorphism.random(n, m, rng)
    lam2 = GrassmannMorphism.random(m, k, rng)
    a, b = G.random(n, rng), G.random(n, rng)
    assert lam(a * b).allclose(lam(a) * lam(b), atol=1e-12)
    assert lam(a + b).allclose(lam(a) + lam(b), atol=1e-12)
    assert lam(G.scalar(n, 1.0)) == G.scalar(m, 1.0)
    assert lam2.compose(lam)(a).allclose(lam2(lam(a)), atol=1e-12)
    assert gr_pullback(lam, a) == lam(a)


@given(levels, seeds)
def test_identity_and_body_morphisms(n, seed):
    a = rand(n, seed)
    assert GrassmannMorphism.identity(n)(a) == a
    assert GrassmannMorphism.body_map(n)(a) == G.scalar(0, a.body())


@given(levels, seeds)
def test_json_round_trip(n, seed):
    a = rand(n, seed, is_complex=True)
    back = G.from_json(json.loads(json.dumps(a.to_json())))
    assert back == a
    lam = GrassmannMorphism.random(n, 2, np.random.default_rng(seed))
    lam_back = GrassmannMorphism.from_json(json.loads(json.dumps(lam.to_json())))
    assert lam_back(a) == lam(a)


# -- errors -------------------------------------------------------------------

def test_errors():
    with pytest.raises(DimensionError):
        G.generator(2, 1) * G.generator(3, 1)
    with pytest.raises(DimensionError):
        G(1, {0b10: 1.0})
    with pytest.raises(DimensionError):
        G.scalar(1, 1.0) + G.scalar(1, 1.0, is_complex=True)
    with pytest.raises(DimensionError):
        G.scalar(1, 1.0) * 1j
    with pytest.raises(SingularError):
        G.generator(2, 1).inverse()
    with pytest.raises(InvalidMorphismError):
        GrassmannMorphism(1, 1, [G.scalar(1, 1.0)])
    with pytest.raises(DimensionError):
        G.generator(2, 1).exp()
