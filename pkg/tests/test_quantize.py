from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from superqft import GrassmannElement as G
from superqft import dynamics as dyn
from superqft import model11 as m11
from superqft import model32 as m32
from superqft import quantize as qz
from superqft.errors import DimensionError, PreconditionError, SupportError, UnsupportedError

GRID = m11.Grid11(0.0, 2.0, 1025)
TH = dyn.theory11(GRID)
REG = qz.GeneratorRegistry(TH)
SECS = dyn.random_sections11(GRID, np.random.default_rng(7), 6)
GENS = [qz.field(F, REG) for F in SECS]
K = len(REG)

words = st.lists(st.integers(0, K - 1), max_size=6).map(tuple)
short = st.lists(st.integers(0, K - 1), max_size=3).map(tuple)


def test_registry_holds_one_generator_per_section():
    assert K == 6
    assert REG.parities == [F.parity() for F in SECS]


def test_gauss_rationals_are_exact():
    a, b = qz.GaussQ.of(0.5 + 0.25j), qz.GaussQ(Fraction(1, 3), Fraction(-2))
    assert a * b == qz.GaussQ(Fraction(1, 6) + Fraction(1, 2), Fraction(-1) + Fraction(1, 12))
    assert (a - a) == qz.ZERO and not (a - a)
    assert a.conj().conj() == a
    assert complex(a) == 0.5 + 0.25j


@given(words)
def test_normal_form_is_normal_and_confluent(w):
    left, right = qz.normal_form(REG, w, "left"), qz.normal_form(REG, w, "right")
    assert left == right
    assert all(qz.is_normal(REG, u) for u in left)
    assert all(len(u) <= len(w) and len(u) % 2 == len(w) % 2 for u in left)


@given(words)
def test_normal_words_are_fixed(w):
    nf = qz.normal_form(REG, w)
    for u in nf:
        assert qz.normal_form(REG, u) == {u: qz.ONE}


def test_single_swap_matches_relation():
    s, beta = TH.swap_sign, qz.GaussQ.of(TH.beta)
    for i in range(K):
        for j in range(i + 1, K):
            nf = qz.normal_form(REG, (j, i))
            sign = -s * (-1) ** (REG.parities[i] * REG.parities[j])
            expect = {(i, j): qz.GaussQ(Fraction(sign))}
            if REG.tau(j, i):
                expect[()] = beta * REG.tau(j, i)
            assert nf == expect


@given(short, short, short)
def test_product_is_associative_and_star_reverses(a, b, c):
    x, y, z = (qz.word_element(REG, w) for w in (a, b, c))
    assert qz.alg_mul(qz.alg_mul(x, y), z) == qz.alg_mul(x, qz.alg_mul(y, z))
    px, py = x.parity(), y.parity()
    xy = qz.alg_mul(x, y)
    assert qz.alg_star(xy) == qz.alg_mul(qz.alg_star(y), qz.alg_star(x)).scale((-1) ** (px * py))
    assert qz.alg_star(qz.alg_star(x)) == x
    if not xy.is_zero():
        assert xy.parity() == (px + py) % 2


def test_fields_are_self_adjoint():
    assert all(qz.alg_star(a) == a for a in GENS)


def test_graded_commutator_is_beta_tau():
    for i, F1 in enumerate(SECS):
        for j, F2 in enumerate(SECS):
            comm = qz.graded_commutator(GENS[i], GENS[j])
            assert set(comm.terms) <= {()}
            expect = TH.beta * dyn.tau(TH, F1, F2)
            got = complex(comm.coeff(()).body()) if comm.terms else 0.0
            assert got == pytest.approx(expect if abs(expect) >= qz.TAU_SNAP else 0.0, rel=1e-12, abs=1e-15)


def test_field_is_linear_and_splits_parities():
    lin = qz.field(SECS[0] + SECS[2] * 2.0, REG) - (GENS[0] + GENS[2].scale(2.0))
    assert lin.max_abs() <= 1e-10
    mixed = m11.Section11(GRID, SECS[0].f + SECS[1].f, SECS[0].h + SECS[1].h)
    assert len(qz.field(mixed, REG).terms) == 2
    assert qz.field(m11.Section11.zeros(GRID), REG).is_zero()


def test_enriched_field_is_coefficient_times_field(rng):
    zeta = G.random(2, rng, parity=1)
    direct = qz.alg_mul(qz.AlgebraElement.unit(2, REG, zeta.complexify()), qz.field(SECS[1], REG, 2))
    assert qz.enriched_field(zeta, SECS[1], REG) == direct


def test_weak_equation_of_motion(rng):
    F = dyn.random_sections11(GRID, rng, 1)[0]
    assert qz.check_eom(F, REG, dyn.random_sections11(GRID, rng, 16)) <= 1e-6


def test_susy_hat_is_an_odd_derivation():
    x, y = GENS[0], qz.word_element(REG, (1, 2))
    lhs = qz.susy_hat(qz.alg_mul(x, y), m11.susy_Q, REG)
    rhs = qz.alg_mul(qz.susy_hat(x, m11.susy_Q, REG), y) + \
        qz.alg_mul(x, qz.susy_hat(y, m11.susy_Q, REG)).scale((-1) ** x.parity())
    assert (lhs - rhs).max_abs() <= 1e-10
    assert qz.susy_hat(qz.AlgebraElement.unit(0, REG), m11.susy_Q, REG).is_zero()


def test_preconditions():
    with pytest.raises(SupportError):
        qz.field(m11.Section11.even(GRID, np.ones(GRID.N)), REG)
    with pytest.raises(PreconditionError):
        qz.check_causality(SECS[0], SECS[1], REG)
    flat_off = dyn.theory32(m32.Grid32(16, 8, 8), flat=False)
    with pytest.raises(UnsupportedError):
        qz.susy_hat(qz.AlgebraElement.zero(0, qz.GeneratorRegistry(flat_off)), m32.susy_QB, qz.GeneratorRegistry(flat_off))
    other = qz.GeneratorRegistry(TH)
    with pytest.raises(DimensionError):
        qz.alg_mul(GENS[0], qz.AlgebraElement.unit(0, other))


def test_json_is_sorted_by_word():
    x = qz.word_element(REG, (3, 1, 2))
    data = x.to_json()
    assert [t["word"] for t in data["terms"]] == sorted(t["word"] for t in data["terms"])
