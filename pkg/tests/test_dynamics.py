import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from superqft import dynamics as dyn
from superqft import model11 as m11
from superqft import model32 as m32
from superqft import numerics as nm
from superqft.errors import GridError, PreconditionError

GRID = m11.Grid11(0.0, 2.0, 2049)
TH = dyn.theory11(GRID)
seeds = st.integers(0, 2**32 - 1)


def test_theory_constants():
    assert (TH.parity_P, TH.beta, TH.swap_sign) == (1, 1.0, 1)
    th3 = dyn.theory32(m32.Grid32(16, 8, 8))
    assert (th3.parity_P, th3.beta, th3.swap_sign) == (0, 1j, -1)


@given(seeds)
def test_random_sections_are_compact(seed):
    for F in dyn.random_sections11(GRID, np.random.default_rng(seed), 5):
        assert F.is_compact() and F.parity() in (0, 1)


@given(seeds)
def test_tau_symmetry_class_11(seed):
    rng = np.random.default_rng(seed)
    F1, F2 = dyn.random_sections11(GRID, rng, 2)
    a, b = dyn.tau(TH, F1, F2), dyn.tau(TH, F2, F1)
    p1, p2 = F1.parity(), F2.parity()
    scale = max(abs(a), abs(b), 1e-300)
    if p1 != p2:
        assert abs(a) <= 1e-12
    else:
        # s = +1 in 1|1: τ(F1, F2) = (−1)^{|F1||F2|} τ(F2, F1)
        assert abs(a - (-1) ** (p1 * p2) * b) <= 1e-10 * scale


def test_tau_even_even_is_product_of_integrals():
    f1, f2 = nm.gaussian(GRID.t, 0.9, 0.05), nm.gaussian(GRID.t, 1.1, 0.06)
    val = dyn.tau(TH, m11.Section11.even(GRID, f1), m11.Section11.even(GRID, f2))
    expect = 0.05 * 0.06 * 2 * np.pi
    assert val == pytest.approx(expect, rel=1e-8)


def test_tau_odd_odd_kernel_is_antisymmetric():
    # ∬ (t−s) h1(s) h2(t) = A1 A2 (c2 − c1) for Gaussian bumps
    h1, h2 = nm.gaussian(GRID.t, 0.9, 0.05), nm.gaussian(GRID.t, 1.1, 0.06)
    val = dyn.tau(TH, m11.Section11.odd(GRID, h1), m11.Section11.odd(GRID, h2))
    assert val == pytest.approx(0.05 * 0.06 * 2 * np.pi * 0.2, rel=1e-8)


def test_tau_super_skew_in_32(rng):
    g = m32.Grid32(48, 24, 24)
    th = dyn.theory32(g)
    S = dyn.random_sections32(g, rng, 4)
    for a in S:
        for b in S:
            x, y = dyn.tau(th, a, b), dyn.tau(th, b, a)
            if a.parity() != b.parity():
                assert abs(x) <= 1e-10 * max(1.0, abs(y))
            else:
                assert x == pytest.approx(-((-1) ** (a.parity() * b.parity())) * y, rel=1e-10, abs=1e-14)


@given(seeds)
@settings(max_examples=15)
def test_exact_sequence(seed):
    F = dyn.random_sections11(GRID, np.random.default_rng(seed), 1)[0]
    PF = TH.apply_P(F)
    assert dyn.causal_propagator(TH, PF).max_abs() <= 1e-6 * F.max_abs()


def test_uniqueness_gap_small():
    h = nm.gaussian(GRID.t, 1.0, 0.07) * np.cos(4 * GRID.t)
    assert dyn.uniqueness_gap(h, GRID) <= 1e-6


def test_causal_disjointness():
    assert dyn.causally_disjoint(TH, (10, 20), (1000, 1010)) is False
    assert dyn.causally_disjoint(TH, None, (1, 2))
    g = m32.Grid32(16, 64, 16)
    th = dyn.theory32(g)
    near = ((6, 8), (10, 12), (6, 8))
    far = ((6, 8), (40, 42), (6, 8))
    assert dyn.causally_disjoint(th, near, far)
    assert not dyn.causally_disjoint(th, near, ((9, 10), (14, 15), (6, 8)))


def test_timeslice_representative_moves_support_and_keeps_class(rng):
    F = m11.Section11.odd(GRID, nm.gaussian(GRID.t, 0.6, 0.05))
    slab = (0.9, 1.3)
    Fp = dyn.timeslice_representative(TH, F, slab)
    lo, hi = Fp.support(rtol=1e-8)
    assert GRID.t[lo] >= slab[0] - 2 * GRID.h and GRID.t[hi] <= slab[1] + 2 * GRID.h
    tests = dyn.random_sections11(GRID, rng, 16)
    scale = max(abs(dyn.tau(TH, F, X)) for X in tests)
    assert max(abs(dyn.tau(TH, F - Fp, X)) for X in tests) <= 1e-6 * scale
    inside = m11.Section11.odd(GRID, nm.gaussian(GRID.t, 1.1, 0.01))
    assert dyn.timeslice_representative(TH, inside, slab) is inside


def test_timeslice_leakage_is_fourth_order():
    leak = []
    for N in (1025, 2049):
        g = m11.Grid11(0.0, 2.0, N)
        F = m11.Section11.odd(g, nm.gaussian(g.t, 0.6, 0.05))
        Fp = dyn.timeslice_representative(dyn.theory11(g), F, (0.9, 1.3))
        out = (g.t < 0.9 - 2 * g.h) | (g.t > 1.3 + 2 * g.h)
        leak.append(max(np.abs(Fp.f[out]).max(), np.abs(Fp.h[out]).max()) / Fp.max_abs())
    assert np.log2(leak[0] / leak[1]) == pytest.approx(4.0, abs=0.5)


def test_timeslice_preconditions():
    F = m11.Section11.odd(GRID, nm.gaussian(GRID.t, 0.6, 0.05))
    with pytest.raises(PreconditionError):
        dyn.timeslice_representative(TH, F, (-1.0, 1.0))
    with pytest.raises(GridError):
        dyn.timeslice_representative(TH, F, (1.0, 1.0 + 3 * GRID.h))


def test_weak_nondegeneracy_probe_reports(rng):
    F = dyn.random_sections11(GRID, rng, 1)[0]
    probe = dyn.weak_nondegeneracy_probe(TH, F, dyn.random_sections11(GRID, rng, 8))
    assert probe["family_size"] == 8 and probe["norm_GF"] > 0
