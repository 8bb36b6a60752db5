"""Λₙ-relative morphisms, exchange of superpoints and randomized law checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import model11 as m11
from . import model32 as m32
from . import numerics as nm
from .errors import DimensionError, GridError
from .grassmann import GrassmannElement, GrassmannMorphism
from .superfield import GrassmannSection

NATURALITY_TOL = {"1|1": 1e-6, "3|2": 5e-3}
LAW_TOL = 1e-6

# Nested 1|1 intervals with a common spacing of 1/2048.
CHAIN11 = (m11.Grid11(0.5, 1.5, 2049), m11.Grid11(0.25, 1.75, 3073), m11.Grid11(0.0, 2.0, 4097))


@dataclass(frozen=True)
class RelMorphism:
    """A morphism over ptₙ of either model; ``payload`` is a Morphism11 or Morphism32."""

    model: str
    payload: Any

    def __post_init__(self):
        want = m11.Morphism11 if self.model == "1|1" else m32.Morphism32
        if not isinstance(self.payload, want):
            raise DimensionError(f"payload does not belong to the {self.model} model")

    @classmethod
    def wrap(cls, payload) -> "RelMorphism":
        return cls("1|1" if isinstance(payload, m11.Morphism11) else "3|2", payload)

    @property
    def n(self) -> int:
        return self.payload.n

    @property
    def source(self):
        return self.payload.source if self.model == "1|1" else self.payload.grid

    @property
    def target(self):
        return self.payload.target if self.model == "1|1" else self.payload.grid

    def pullback(self, H: GrassmannSection) -> GrassmannSection:
        return m11.pullback11(self.payload, H) if self.model == "1|1" else m32.pullback32(self.payload, H)

    def pushforward(self, H: GrassmannSection) -> GrassmannSection:
        return m11.pushforward11(self.payload, H) if self.model == "1|1" else m32.pushforward32(self.payload, H)

    def relative_P(self, H: GrassmannSection) -> GrassmannSection:
        return m11.relative_P11(H) if self.model == "1|1" else m32.relative_P32(H)

    def params(self) -> list[GrassmannElement]:
        p = self.payload
        if self.model == "1|1":
            return [p.shift, p.susy]
        return [*p.translation, *p.eps]

    def allclose(self, other: "RelMorphism", atol: float = 1e-12) -> bool:
        return (self.model == other.model and self.n == other.n
                and all(a.allclose(b, atol=atol) for a, b in zip(self.params(), other.params())))

    def to_json(self) -> dict:
        return self.payload.to_json()

    @classmethod
    def from_json(cls, data: dict) -> "RelMorphism":
        if data.get("model") == "3|2":
            return cls("3|2", m32.Morphism32.from_json(data))
        return cls("1|1", m11.Morphism11.from_json(data))


def compose_rel(m2: RelMorphism, m1: RelMorphism) -> RelMorphism:
    """m2 ∘ m1 (m1 acts first), by closed-form parameter composition."""
    if m1.model != m2.model:
        raise DimensionError("cannot compose morphisms of different models")
    if m1.n != m2.n:
        raise DimensionError(f"superpoint levels differ: {m1.n} vs {m2.n}")
    if m1.target != m2.source:
        raise GridError("target of the first morphism must be the source of the second")
    return RelMorphism(m1.model, m2.payload.compose_after(m1.payload))


def identity_rel(model: str, n: int, grid) -> RelMorphism:
    if model == "1|1":
        return RelMorphism(model, m11.Morphism11.identity(n, grid))
    return RelMorphism(model, m32.Morphism32.identity(n, grid))


def exchange_superpoint(lam: GrassmannMorphism, m: RelMorphism) -> RelMorphism:
    """λ_op∗: push every Grassmann parameter of m through λ."""
    return RelMorphism(m.model, m.payload.exchange(lam))


def exchange_section(lam: GrassmannMorphism, H: GrassmannSection) -> GrassmannSection:
    """Σ ζ^I ⊗ F_I ↦ Σ λ(ζ^I) ⊗ F_I, a section over the target superpoint."""
    if H.n != lam.source_n:
        raise DimensionError("section lives over the wrong superpoint")
    out: dict[int, Any] = {}
    for z, F in H.terms.items():
        image = lam(GrassmannElement(H.n, {z: 1.0}))
        for m, c in image.coeffs.items():
            piece = F * float(c)
            out[m] = out[m] + piece if m in out else piece
    if not out:
        out[0] = next(iter(H.terms.values())) * 0.0
    return GrassmannSection(lam.target_n, out, H.k)


# -- samplers ----------------------------------------------------------------

def random_section(n: int, components: Sequence[Any], rng: np.random.Generator) -> GrassmannSection:
    """Σ_I ζ^I ⊗ F_I with F_I drawn from ``components`` (cycled) and random weights."""
    terms = {}
    for z in range(1 << n):
        F = components[z % len(components)]
        terms[z] = F * float(rng.uniform(-1, 1))
    return GrassmannSection(n, terms, getattr(components[0], "THETA_COUNT", 1))


def bumps11(grid: m11.Grid11, centres: Sequence[float], rng: np.random.Generator, width: float = 0.04):
    """Mixed-parity Gaussian sections at given centres."""
    out = []
    for c in centres:
        out.append(m11.Section11(grid, nm.gaussian(grid.t, c, width) * rng.uniform(0.5, 1.5),
                                 nm.gaussian(grid.t, c + 0.3 * width, width) * rng.uniform(-1.5, 1.5)))
    return out


def _centres_through(m: RelMorphism, rng: np.random.Generator, count: int) -> list[float]:
    """Target-grid centres whose pullback lands in the middle half of the source interval."""
    src = m.source
    span = src.t1 - src.t0
    c = m.payload.body
    return [float(rng.uniform(src.t0 + 0.3 * span, src.t1 - 0.3 * span) + c) for _ in range(count)]


def smooth_sections32(grid: m32.Grid32, rng: np.random.Generator, count: int, time_width: float = 1.0):
    """Low spatial modes times a broad time envelope: data on which the stencils are accurate."""
    T, X, Y = grid.coords()
    tc = grid.t0 + grid.dt * (grid.Nt - 1) / 2
    env = np.exp(-0.5 * ((T - tc) / time_width) ** 2)

    def mode():
        a, b, c = rng.uniform(0, 2 * np.pi, 3)
        w = rng.uniform(0.5, 1.5, 3)
        return env * (w[0] * np.cos(X + a) + w[1] * 0.5 * np.sin(Y + b) + w[2] * 0.3 * np.cos(X - Y + c))

    return [m32.Section32.make(grid, phi=mode(), psi=np.stack([mode(), mode()]), eta=mode())
            for _ in range(count)]


def _sections_for(m: RelMorphism, rng: np.random.Generator, count: int = 2):
    if m.model == "1|1":
        return bumps11(m.target, _centres_through(m, rng, count), rng)
    from .dynamics import random_sections32
    pulses = random_sections32(m.target, rng, 2 * count, width=0.5, time_width=0.25)
    return [pulses[2 * i] + pulses[2 * i + 1] for i in range(count)]


def _rel(a: GrassmannSection, b: GrassmannSection) -> float:
    scale = max(a.max_abs(), b.max_abs(), 1e-300)
    return (a - b).max_abs() / scale


# -- checks ------------------------------------------------------------------

def check_naturality(m: RelMorphism, samples: int = 4, rng: np.random.Generator | None = None,
                     seed: int = 0) -> dict:
    """max ‖χ*(id⊗P)H − (id⊗P)χ*H‖ / ‖(id⊗P)χ*H‖ over random Λₙ-sections H.

    1|1 uses narrow bumps; 3|2 uses smooth low-mode data, where the compact
    and product discretizations of □ agree to second order.
    """
    rng = rng or np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        if m.model == "1|1":
            comps = _sections_for(m, rng, 2)
        else:
            comps = smooth_sections32(m.target, rng, 2)
        H = random_section(m.n, comps, rng)
        lhs = m.pullback(m.relative_P(H))
        rhs = m.relative_P(m.pullback(H))
        worst = max(worst, _rel(lhs, rhs))
    tol = NATURALITY_TOL[m.model]
    return {"model": m.model, "n": m.n, "max_residual": worst, "tol": tol, "pass": worst <= tol}


def _random_lambda(n: int, rng: np.random.Generator) -> GrassmannMorphism:
    return GrassmannMorphism.random(n, int(rng.integers(0, 4)), rng)


def _chain11(n: int, rng: np.random.Generator) -> tuple[RelMorphism, RelMorphism]:
    A, B, C = CHAIN11
    return (RelMorphism("1|1", m11.Morphism11.random(n, rng, A, B)),
            RelMorphism("1|1", m11.Morphism11.random(n, rng, B, C)))


def _chain32(n: int, rng: np.random.Generator, grid: m32.Grid32) -> tuple[RelMorphism, RelMorphism]:
    return (RelMorphism("3|2", m32.Morphism32.random(n, rng, grid)),
            RelMorphism("3|2", m32.Morphism32.random(n, rng, grid)))


def check_functor_laws(trials: int = 200, seed: int = 0, max_n: int = 3,
                       grid32: m32.Grid32 | None = None) -> dict:
    """Randomized identity, composition and exchange laws for both models.

    Each trial draws a model, a level n ≤ max_n, a composable pair and a
    section, then compares
      id* H = H,  (m2∘m1)* H = m1*(m2* H),  λ(m2∘m1) = λm2 ∘ λm1,
      (λ'∘λ)_* m = λ'_*(λ_* m),  λ_*(m*H) = (λ_*m)*(λ_*H).
    """
    rng = np.random.default_rng(seed)
    grid32 = grid32 or m32.Grid32(64, 16, 16)
    worst = {"identity": 0.0, "composition": 0.0, "exchange_composition": 0.0,
             "exchange_functorial": 0.0, "exchange_pullback": 0.0, "associativity": 0.0}
    for trial in range(trials):
        model = "1|1" if trial % 2 == 0 else "3|2"
        n = int(rng.integers(0, max_n + 1))
        m1, m2 = _chain11(n, rng) if model == "1|1" else _chain32(n, rng, grid32)
        m12 = compose_rel(m2, m1)
        if model == "1|1":
            comps = bumps11(m2.target, _centres_through(m12, rng, 2), rng)
        else:
            comps = _sections_for(m2, rng, 2)
        H = random_section(n, comps, rng)

        ident = identity_rel(model, n, m2.target)
        worst["identity"] = max(worst["identity"], _rel(ident.pullback(H), H))

        two_step = m1.pullback(m2.pullback(H))
        worst["composition"] = max(worst["composition"], _rel(m12.pullback(H), two_step))

        if model == "1|1":
            m3 = RelMorphism("1|1", m11.Morphism11.random(n, rng, m2.target, m2.target, body=False))
        else:
            m3 = RelMorphism("3|2", m32.Morphism32.random(n, rng, grid32))
        a = compose_rel(m3, compose_rel(m2, m1))
        b = compose_rel(compose_rel(m3, m2), m1)
        worst["associativity"] = max(worst["associativity"], _param_gap(a, b))

        lam = _random_lambda(n, rng)
        lam2 = _random_lambda(lam.target_n, rng)
        lhs = exchange_superpoint(lam, m12)
        rhs = compose_rel(exchange_superpoint(lam, m2), exchange_superpoint(lam, m1))
        worst["exchange_composition"] = max(worst["exchange_composition"], _param_gap(lhs, rhs))
        lhs = exchange_superpoint(lam2.compose(lam), m1)
        rhs = exchange_superpoint(lam2, exchange_superpoint(lam, m1))
        worst["exchange_functorial"] = max(worst["exchange_functorial"], _param_gap(lhs, rhs))

        via_params = exchange_superpoint(lam, m2).pullback(exchange_section(lam, H))
        via_sections = exchange_section(lam, m2.pullback(H))
        worst["exchange_pullback"] = max(worst["exchange_pullback"], _rel(via_params, via_sections))
    laws = {k: {"max_residual": v, "pass": v <= LAW_TOL} for k, v in worst.items()}
    return {"trials": trials, "seed": seed, "laws": laws, "pass": all(l["pass"] for l in laws.values())}


def _param_gap(a: RelMorphism, b: RelMorphism) -> float:
    if a.n != b.n:
        return float("inf")
    return max((x - y).max_abs() for x, y in zip(a.params(), b.params()))


def check_adjointness(m: RelMorphism, rng: np.random.Generator, samples: int = 3) -> float:
    """max ‖χ*(χ_* H) − H‖ / ‖H‖ for compactly supported H on the source."""
    worst = 0.0
    for _ in range(samples):
        if m.model == "1|1":
            src = m.source
            span = src.t1 - src.t0
            comps = bumps11(src, [float(rng.uniform(src.t0 + 0.35 * span, src.t1 - 0.35 * span))
                                  for _ in range(2)], rng)
        else:
            comps = _sections_for(m, rng, 2)
        H = random_section(m.n, comps, rng)
        worst = max(worst, _rel(m.pullback(m.pushforward(H)), H))
    return worst


def non_naturality_witness(n: int = 1, seed: int = 0) -> dict:
    """Pull back a purely even 1 ⊗ F along a ζ ≠ 0 morphism and measure the odd ζ-coefficient.

    The output acquires ζ ⊗ (odd section), so the ordinary even and odd
    component fields are not preserved separately.
    """
    rng = np.random.default_rng(seed)
    grid = CHAIN11[2]
    zeta = GrassmannElement.generator(n, 1)
    m = RelMorphism("1|1", m11.Morphism11.make(n, 0.0, zeta, source=grid))
    F = m11.Section11.even(grid, nm.gaussian(grid.t, 1.0 + 0.1 * rng.uniform(-1, 1), 0.08))
    out = m.pullback(GrassmannSection.pure(F, n))
    odd = out.component([1])
    size = 0.0 if odd is None else float(np.max(np.abs(odd.h)))
    ratio = size / F.max_abs()
    return {"odd_coefficient": size, "input_scale": F.max_abs(), "ratio": ratio, "pass": ratio > 1e-3}
