import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from superqft import GrassmannElement as G
from superqft import model11 as m11
from superqft import numerics as nm
from superqft.errors import DimensionError, GridError, InvalidMorphismError, SupportError
from superqft.superfield import GrassmannSection

GRID = m11.Grid11(0.0, 2.0, 2049)
T = GRID.t

centres = st.floats(0.8, 1.2)
widths = st.floats(0.04, 0.07)


def bump(c, w, odd_c=None):
    h = nm.gaussian(T, odd_c if odd_c is not None else c + 0.01, w) * np.cos(5 * T)
    return m11.Section11(GRID, nm.gaussian(T, c, w), h)


def test_P_and_Q_by_hand():
    # f = t², h = t³ on the interior: P = 3t² + θ·2, Q = t³ − θ·2t
    F = m11.Section11(GRID, T**2, T**3)
    P = m11.apply_P11(F)
    assert np.allclose(P.f, 3 * T**2, atol=1e-9)
    assert np.allclose(P.h, 2.0, atol=1e-9)
    Q = m11.susy_Q(F)
    assert np.allclose(Q.f, T**3) and np.allclose(Q.h, -2 * T, atol=1e-9)


def test_Q_squared_is_minus_dt():
    F = bump(1.0, 0.06)
    QQ = m11.susy_Q(m11.susy_Q(F))
    dF = m11.Section11(GRID, m11.dt(F.f, GRID), m11.dt(F.h, GRID))
    assert (QQ + dF).max_abs() <= 1e-12 * dF.max_abs()


def test_green_dt_against_erf():
    c, s = 1.0, 0.06
    f = nm.gaussian(T, c, s)
    exact = s * math.sqrt(math.pi / 2) * (1 + np.vectorize(math.erf)((T - c) / (s * math.sqrt(2))))
    assert np.max(np.abs(m11.green_dt(f, GRID, "retarded") - exact)) <= 1e-8


@given(centres, widths)
def test_green_inverts_P_on_both_sides(c, w):
    F = bump(c, w)
    for side in ("retarded", "advanced"):
        assert (m11.apply_P11(m11.green11(F, side)) - F).max_abs() <= 1e-6 * F.max_abs()
        assert (m11.green11(m11.apply_P11(F), side) - F).max_abs() <= 1e-6 * F.max_abs()


@given(centres, widths)
def test_retarded_vanishes_in_the_past(c, w):
    F = bump(c, w)
    i0, i1 = F.support()
    GF = m11.green11(F, "retarded")
    assert GF.support()[0] >= i0 - 2
    GA = m11.green11(F, "advanced")
    assert GA.support()[1] <= i1 + 2


@given(centres, centres, widths, st.integers(0, 1))
def test_P_is_super_self_adjoint(c1, c2, w, p):
    make = m11.Section11.odd if p else m11.Section11.even
    F1, F2 = make(GRID, nm.gaussian(T, c1, w)), make(GRID, nm.gaussian(T, c2, w) * np.sin(3 * T))
    lhs = m11.pair11(F1, m11.apply_P11(F2))
    rhs = (-1) ** p * m11.pair11(m11.apply_P11(F1), F2)
    assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-12)


def test_pairing_is_symmetric_and_odd():
    F1, F2 = bump(0.9, 0.05), bump(1.1, 0.06)
    assert m11.pair11(F1, F2) == pytest.approx(m11.pair11(F2, F1), rel=1e-14)
    assert m11.pair11(F1.even_part(), F2.even_part()) == 0.0


def test_section_json_round_trip():
    F = bump(1.0, 0.05)
    back = m11.Section11.from_json(json.loads(json.dumps(F.to_json())))
    assert np.array_equal(back.f, F.f) and np.array_equal(back.h, F.h)
    with pytest.raises(DimensionError):
        m11.Section11.from_json({**F.to_json(), "model": "3|2"})


# -- morphisms ----------------------------------------------------------------

def test_identity_pullback_is_exact():
    H = GrassmannSection.pure(bump(1.0, 0.05), 2, G.from_terms(2, {(): 1.0, (1, 2): 0.5}))
    out = m11.pullback11(m11.Morphism11.identity(2, GRID), H)
    assert (out - H).max_abs() == 0.0


def test_grid_shift_pullback_translates():
    F = bump(1.0, 0.05)
    src = m11.Grid11(0.0, 2.0 - 20 * GRID.h, GRID.N - 20)
    m = m11.Morphism11.make(0, 10 * GRID.h, source=src, target=GRID)
    out = m11.pullback11(m, GrassmannSection.pure(F, 0)).terms[0]
    assert np.allclose(out.f, F.f[10:10 + src.N], atol=1e-14)


@given(st.integers(0, 2**32 - 1))
def test_composition_matches_two_step_pullback(seed):
    rng = np.random.default_rng(seed)
    A = m11.Grid11(0.5, 1.5, 1025)
    B = m11.Grid11(0.25, 1.75, 1537)
    C = m11.Grid11(0.0, 2.0, 2049)
    m1 = m11.Morphism11.random(2, rng, A, B)
    m2 = m11.Morphism11.random(2, rng, B, C)
    c = 1.0 + m1.body + m2.body
    F = m11.Section11(C, nm.gaussian(C.t, c, 0.05), nm.gaussian(C.t, c, 0.04))
    H = GrassmannSection.pure(F, 2, G.random(2, rng))
    direct = m11.pullback11(m2.compose_after(m1), H)
    two = m11.pullback11(m1, m11.pullback11(m2, H))
    assert (direct - two).max_abs() <= 1e-8 * max(two.max_abs(), 1e-300)


def test_zeta_mixes_parities():
    F = m11.Section11.even(GRID, nm.gaussian(T, 1.0, 0.08))
    m = m11.Morphism11.make(1, 0.0, G.generator(1, 1), source=GRID)
    out = m11.pullback11(m, GrassmannSection.pure(F, 1))
    odd = out.component([1])
    # ζ-coefficient is θ·(−∂t f)·(−1) from t − ζθ: h = ∂t f up to sign
    assert np.max(np.abs(np.abs(odd.h) - np.abs(m11.dt(F.f, GRID)))) <= 1e-12
    assert np.max(np.abs(odd.h)) > 1e-3


def test_morphism_json_round_trip(rng):
    m = m11.Morphism11.random(2, rng, GRID)
    back = m11.Morphism11.from_json(json.loads(json.dumps(m.to_json())))
    assert back.shift == m.shift and back.susy == m.susy and back.source == m.source


def test_errors():
    with pytest.raises(GridError):
        m11.Grid11(0.0, 1.0, 3)
    with pytest.raises(GridError):
        m11.Grid11(1.0, 1.0, 100)
    with pytest.raises(GridError):
        m11.Section11(GRID, np.zeros(3), np.zeros(3))
    with pytest.raises(SupportError):
        m11.green11(m11.Section11.even(GRID, np.ones(GRID.N)))
    with pytest.raises(ValueError):
        m11.green_dt(np.zeros(GRID.N), GRID, "sideways")
    with pytest.raises(InvalidMorphismError):
        m11.Morphism11.make(0, 0.5, source=GRID)
    with pytest.raises(InvalidMorphismError):
        m11.Morphism11(1, G.generator(1, 1), G.zero(1), GRID, GRID)
