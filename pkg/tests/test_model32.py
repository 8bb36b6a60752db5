import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superqft import GrassmannElement as G
from superqft import model32 as m32
from superqft.errors import DimensionError, GridError, InvalidMorphismError, SupportError
from superqft.superfield import GrassmannSection

SMALL = m32.Grid32(48, 24, 24)


def pulse(g, centre, w=0.6, wt=0.3):
    T, X, Y = g.coords()
    return np.exp(-0.5 * ((T - centre[0]) / wt) ** 2 - ((X - centre[1]) ** 2 + (Y - centre[2]) ** 2) / (2 * w * w))


def tmid(g):
    return g.t0 + g.dt * (g.Nt - 1) / 2


def test_clifford_identities_hold_exactly():
    report = m32.verify_clifford()
    assert all(report.values()), [k for k, v in report.items() if not v]


def test_flat_supertorsion_constraints():
    report = m32.check_supertorsion_flat()
    flags = {k: v for k, v in report.items() if k != "components"}
    assert all(flags.values()), flags


def test_levi_civita():
    assert m32.levi_civita3(0, 1, 2) == 1
    assert m32.levi_civita3(1, 0, 2) == -1
    assert m32.levi_civita3(0, 0, 2) == 0


def test_dirac_factorization_is_second_order():
    res = []
    for k in (1, 2):
        g = m32.Grid32(16 * k, 24 * k, 24 * k)
        T, X, Y = g.coords()
        psi = np.stack([np.sin(X) * np.cos(Y) * np.cos(T), np.cos(X + Y) * np.sin(T)])
        res.append(m32.dirac_factorization_residual(psi, g))
    assert res[0] < 0.1
    assert math.log2(res[0] / res[1]) == pytest.approx(2.0, abs=0.3)


@pytest.mark.parametrize("kind", ["phi", "psi", "eta"])
def test_green_inverts_P_in_the_interior(kind):
    g = m32.Grid32(64, 32, 32)
    p = pulse(g, (tmid(g), 3.0, 3.1))
    F = m32.Section32.make(g, psi=np.stack([p, 0.5 * p])) if kind == "psi" else m32.Section32.make(g, **{kind: p})
    for side in ("retarded", "advanced"):
        res = (m32.apply_P32(m32.green32(F, side)) - F).interior().max_abs() / F.max_abs()
        assert res <= 0.1


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=10)
def test_retarded_output_stays_in_the_numerical_cone(seed):
    rng = np.random.default_rng(seed)
    src = np.zeros(SMALL.shape)
    t0 = int(rng.integers(4, 20))
    x0, y0 = rng.integers(2, 20, 2)
    src[t0:t0 + 3, x0:x0 + 3, y0:y0 + 3] = rng.normal(size=(3, 3, 3))
    F = m32.Section32.make(SMALL, phi=src, psi=np.stack([src, -src]), eta=src)
    cone = m32.cone_mask(F.magnitude() > 0, "retarded")
    out = m32.green32(F, "retarded").magnitude()
    assert out[~cone].max(initial=0.0) <= 1e-12


def test_pairing_is_super_skew():
    T, X, Y = SMALL.coords()
    a = m32.Section32.make(SMALL, psi=np.stack([pulse(SMALL, (1.0, 3, 3)), pulse(SMALL, (1.1, 3, 2))]))
    b = m32.Section32.make(SMALL, psi=np.stack([pulse(SMALL, (1.2, 2, 3)), pulse(SMALL, (0.9, 3, 4))]))
    assert m32.pair32(a, b) == pytest.approx(-m32.pair32(b, a), rel=1e-12)
    c = m32.Section32.make(SMALL, phi=pulse(SMALL, (1.0, 3, 3)), eta=pulse(SMALL, (1.0, 2, 2)))
    d = m32.Section32.make(SMALL, phi=pulse(SMALL, (1.1, 3, 2)), eta=pulse(SMALL, (1.1, 4, 2)))
    assert m32.pair32(c, d) == pytest.approx(m32.pair32(d, c), rel=1e-12)


def test_section_json_round_trip():
    F = m32.Section32.make(m32.Grid32(8, 8, 8), phi=np.arange(512.0).reshape(8, 8, 8))
    back = m32.Section32.from_json(json.loads(json.dumps(F.to_json())))
    assert (back - F).max_abs() == 0.0 and back.grid == F.grid


def test_identity_pullback_is_exact():
    g = m32.Grid32(32, 16, 16)
    F = m32.Section32.make(g, phi=pulse(g, (tmid(g), 3, 3)), psi=np.stack([pulse(g, (tmid(g), 3, 2))] * 2))
    H = GrassmannSection.pure(F, 1, G.generator(1, 1))
    assert (m32.pullback32(m32.Morphism32.identity(1, g), H) - H).max_abs() == 0.0


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=8)
def test_composition_matches_two_step_pullback(seed):
    rng = np.random.default_rng(seed)
    g = m32.Grid32(64, 16, 16)
    m1, m2 = m32.Morphism32.random(2, rng, g), m32.Morphism32.random(2, rng, g)
    T, X, Y = g.coords()
    env = np.exp(-0.5 * ((T - tmid(g)) / 0.6) ** 2)
    F = m32.Section32.make(g, phi=env * np.cos(X), psi=np.stack([env * np.sin(Y), env * np.cos(X - Y)]),
                           eta=env * np.sin(X + Y))
    H = GrassmannSection.pure(F, 2, G.random(2, rng))
    direct = m32.pullback32(m2.compose_after(m1), H)
    two = m32.pullback32(m1, m32.pullback32(m2, H))
    assert (direct - two).max_abs() <= 1e-8 * two.max_abs()


def test_morphism_json_round_trip(rng):
    m = m32.Morphism32.random(2, rng, SMALL)
    back = m32.Morphism32.from_json(json.loads(json.dumps(m.to_json())))
    assert all(a == b for a, b in zip(back.translation + back.eps, m.translation + m.eps))


def test_errors():
    with pytest.raises(GridError):
        m32.Grid32(16, 16, 16, cfl=0.9)
    with pytest.raises(GridError):
        m32.Grid32(16, 16, 16, mass=-1.0)
    with pytest.raises(GridError):
        m32.Section32(SMALL, np.zeros((2, 2, 2)), np.zeros((2, 2, 2, 2)), np.zeros((2, 2, 2)))
    with pytest.raises(SupportError):
        m32.green32(m32.Section32.make(SMALL, phi=np.ones(SMALL.shape)))
    with pytest.raises(ValueError):
        m32.kg_solve(np.ones(SMALL.shape), SMALL, "sideways")
    with pytest.raises(InvalidMorphismError):
        m32.Morphism32(1, (G.generator(1, 1), G.zero(1), G.zero(1)), (G.zero(1), G.zero(1)), SMALL)
    with pytest.raises(DimensionError):
        m32.Section32.from_json({"model": "1|1"})
