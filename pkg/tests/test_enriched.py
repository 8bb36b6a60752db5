import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superqft import GrassmannElement as G
from superqft import GrassmannMorphism
from superqft import enriched as en
from superqft import model11 as m11
from superqft import model32 as m32
from superqft.errors import DimensionError
from superqft.superfield import GrassmannSection

seeds = st.integers(0, 2**32 - 1)
A, B, C = en.CHAIN11


def test_functor_laws_small_run():
    report = en.check_functor_laws(trials=12, seed=3, grid32=m32.Grid32(64, 16, 16))
    assert report["pass"], report["laws"]


@given(st.integers(0, 3), seeds)
@settings(max_examples=15)
def test_composition_is_associative_on_parameters(n, seed):
    rng = np.random.default_rng(seed)
    m1 = en.RelMorphism.wrap(m11.Morphism11.random(n, rng, A, B))
    m2 = en.RelMorphism.wrap(m11.Morphism11.random(n, rng, B, C))
    m3 = en.RelMorphism.wrap(m11.Morphism11.random(n, rng, C, C, body=False))
    lhs = en.compose_rel(m3, en.compose_rel(m2, m1))
    rhs = en.compose_rel(en.compose_rel(m3, m2), m1)
    assert lhs.allclose(rhs)
    ident = en.identity_rel("1|1", n, B)
    assert en.compose_rel(ident, m1).allclose(m1) and en.compose_rel(m2, ident).allclose(m2)


@given(st.integers(0, 3), st.integers(0, 3), seeds)
@settings(max_examples=15)
def test_exchange_respects_composition(n, k, seed):
    rng = np.random.default_rng(seed)
    m1 = en.RelMorphism.wrap(m11.Morphism11.random(n, rng, A, B))
    m2 = en.RelMorphism.wrap(m11.Morphism11.random(n, rng, B, C))
    lam = GrassmannMorphism.random(n, k, rng)
    lhs = en.exchange_superpoint(lam, en.compose_rel(m2, m1))
    rhs = en.compose_rel(en.exchange_superpoint(lam, m2), en.exchange_superpoint(lam, m1))
    assert lhs.allclose(rhs)
    assert en.exchange_superpoint(GrassmannMorphism.identity(n), m1).allclose(m1)


def test_exchange_section_by_hand():
    F = m11.Section11.even(C, np.ones(C.N))
    H = GrassmannSection(1, {0: F, 1: F * 2.0})
    lam = GrassmannMorphism(1, 2, [G.from_terms(2, {(1,): 1.0, (2,): 3.0})])
    out = en.exchange_section(lam, H)
    assert out.n == 2
    assert np.allclose(out.component([1]).f, 2.0) and np.allclose(out.component([2]).f, 6.0)
    with pytest.raises(DimensionError):
        en.exchange_section(GrassmannMorphism.identity(2), H)


def test_naturality_1_1():
    m = en.RelMorphism.wrap(m11.Morphism11.random(2, np.random.default_rng(0), A, C))
    rep = en.check_naturality(m, samples=3)
    assert rep["pass"], rep


def test_naturality_3_2_converges_at_second_order():
    # the acceptance grid is 128×64²; here two coarser grids check the rate
    res = []
    for shape in ((32, 16, 16), (64, 32, 32)):
        g = m32.Grid32(*shape)
        m = en.RelMorphism.wrap(m32.Morphism32.susy(1, g, B=(0.6, -0.8), zeta=G.generator(1, 1)))
        res.append(en.check_naturality(m, samples=2)["max_residual"])
    assert np.log2(res[0] / res[1]) == pytest.approx(2.0, abs=0.3)


@given(st.integers(0, 2), seeds)
@settings(max_examples=10)
def test_pushforward_is_right_inverse_of_pullback(n, seed):
    rng = np.random.default_rng(seed)
    m = en.RelMorphism.wrap(m11.Morphism11.random(n, rng, A, C))
    assert en.check_adjointness(m, rng, samples=1) <= 1e-8


def test_non_naturality_witness():
    rep = en.non_naturality_witness()
    assert rep["pass"] and rep["ratio"] > 1e-3


@pytest.mark.parametrize("model", ["1|1", "3|2"])
def test_json_round_trip(model, rng):
    if model == "1|1":
        m = en.RelMorphism.wrap(m11.Morphism11.random(2, rng, A, C))
    else:
        m = en.RelMorphism.wrap(m32.Morphism32.random(2, rng, m32.Grid32(16, 8, 8)))
    back = en.RelMorphism.from_json(json.loads(json.dumps(m.to_json())))
    assert back.model == model and back.allclose(m, atol=0)
