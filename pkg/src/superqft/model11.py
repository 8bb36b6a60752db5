"""The 1|1 superparticle: sections F = f + θh on a time interval.

P(F) = ∂t h + θ ∂t² f is odd, the pairing is ⟨F1, F2⟩ = ∫ (f1 h2 + h1 f2),
and the Green's operators act componentwise through the antiderivative
kernels of ∂t and ∂t².  Relative morphisms over Λₙ act in coordinates as
t ↦ t + λ − ζθ, θ ↦ θ + ζ, with λ even (body c) and ζ odd.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from . import numerics as nm
from .errors import DimensionError, GridError, InvalidMorphismError, SupportError
from .grassmann import GrassmannElement, GrassmannMorphism, mul_terms
from .superfield import (
    GrassmannSection,
    apply_operator,
    berezin_pairing,
    embed_zeta,
    theta_mask,
    transport,
)

P_PARITY = 1
SUPPORT_MARGIN = 3
SUPPORT_RTOL = 1e-13


@dataclass(frozen=True)
class Grid11:
    t0: float
    t1: float
    N: int

    def __post_init__(self):
        if self.N < nm.MIN_POINTS:
            raise GridError(f"grid needs at least {nm.MIN_POINTS} points, got {self.N}")
        if not self.t1 > self.t0:
            raise GridError("empty time interval")

    @property
    def h(self) -> float:
        return (self.t1 - self.t0) / (self.N - 1)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.N)

    @property
    def weights(self) -> np.ndarray:
        return nm.trapezoid_weights(self.N, self.h)

    def compatible(self, other: "Grid11") -> bool:
        return abs(self.h - other.h) <= 1e-12 * max(1.0, abs(self.h))

    def to_json(self) -> dict:
        return {"t0": self.t0, "t1": self.t1, "N": self.N}


@dataclass(frozen=True, eq=False)
class Section11:
    """F = f + θh sampled on a grid; f is the even, h the odd component."""

    grid: Grid11
    f: np.ndarray
    h: np.ndarray

    THETA_COUNT = 1

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        h = np.asarray(self.h, dtype=float)
        if f.shape != (self.grid.N,) or h.shape != (self.grid.N,):
            raise GridError(f"components must have shape ({self.grid.N},)")
        f.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "h", h)

    @classmethod
    def even(cls, grid: Grid11, f) -> "Section11":
        return cls(grid, np.asarray(f, dtype=float), np.zeros(grid.N))

    @classmethod
    def odd(cls, grid: Grid11, h) -> "Section11":
        return cls(grid, np.zeros(grid.N), np.asarray(h, dtype=float))

    @classmethod
    def zeros(cls, grid: Grid11) -> "Section11":
        return cls(grid, np.zeros(grid.N), np.zeros(grid.N))

    # superfield protocol
    def to_theta(self) -> dict[int, np.ndarray]:
        return {0: self.f, 1: self.h}

    @classmethod
    def from_theta(cls, grid: Grid11, terms: Mapping[int, np.ndarray]) -> "Section11":
        z = np.zeros(grid.N)
        return cls(grid, terms.get(0, z), terms.get(1, z))

    def parity(self) -> int | None:
        has_f, has_h = np.any(self.f != 0), np.any(self.h != 0)
        if has_f and has_h:
            return None
        return 1 if has_h else 0

    def is_zero(self) -> bool:
        return not (np.any(self.f != 0) or np.any(self.h != 0))

    def even_part(self) -> "Section11":
        return Section11.even(self.grid, self.f)

    def odd_part(self) -> "Section11":
        return Section11.odd(self.grid, self.h)

    def support(self, rtol: float = SUPPORT_RTOL) -> tuple[int, int] | None:
        """Index window [i0, i1] holding every sample above rtol·max; None if zero."""
        mag = np.maximum(np.abs(self.f), np.abs(self.h))
        top = mag.max()
        if top == 0:
            return None
        idx = np.nonzero(mag > rtol * top)[0]
        return int(idx[0]), int(idx[-1])

    def is_compact(self, margin: int = SUPPORT_MARGIN) -> bool:
        s = self.support()
        return s is None or (s[0] >= margin and s[1] <= self.grid.N - 1 - margin)

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.f)), np.max(np.abs(self.h))))

    def _check(self, other: "Section11") -> None:
        if self.grid != other.grid:
            raise GridError("sections live on different grids")

    def __add__(self, other: "Section11") -> "Section11":
        self._check(other)
        return Section11(self.grid, self.f + other.f, self.h + other.h)

    def __sub__(self, other: "Section11") -> "Section11":
        self._check(other)
        return Section11(self.grid, self.f - other.f, self.h - other.h)

    def __mul__(self, s: float) -> "Section11":
        return Section11(self.grid, s * self.f, s * self.h)

    __rmul__ = __mul__

    def __neg__(self) -> "Section11":
        return self * -1.0

    def to_json(self) -> dict:
        s = self.support()
        return {"model": "1|1", "t0": self.grid.t0, "t1": self.grid.t1, "N": self.grid.N,
                "f": self.f.tolist(), "h": self.h.tolist(),
                "support": list(s) if s is not None else None}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Section11":
        if data.get("model", "1|1") != "1|1":
            raise DimensionError(f"expected a 1|1 section, got {data.get('model')}")
        grid = Grid11(float(data["t0"]), float(data["t1"]), int(data["N"]))
        return cls(grid, np.asarray(data["f"], dtype=float), np.asarray(data["h"], dtype=float))


def dt(u: np.ndarray, grid: Grid11) -> np.ndarray:
    return nm.derivative(u, grid.h, order=1)


def dt2(u: np.ndarray, grid: Grid11) -> np.ndarray:
    return nm.derivative(u, grid.h, order=2)


def apply_P11(F: Section11) -> Section11:
    """P(f + θh) = ∂t h + θ ∂t² f."""
    return Section11(F.grid, dt(F.h, F.grid), dt2(F.f, F.grid))


def susy_Q(F: Section11) -> Section11:
    """Q = ∂θ − θ∂t, so Q(f + θh) = h − θ ∂t f."""
    return Section11(F.grid, F.h, -dt(F.f, F.grid))


def green_dt(f: np.ndarray, grid: Grid11, side: str) -> np.ndarray:
    """Retarded ∫_{t0}^t f or advanced −∫_t^{t1} f."""
    if side == "retarded":
        return nm.cumulative_integral(f, grid.h)
    if side == "advanced":
        return -nm.reverse_cumulative_integral(f, grid.h)
    raise ValueError(f"side must be 'retarded' or 'advanced', got {side!r}")


def green_dt2(h: np.ndarray, grid: Grid11, side: str) -> np.ndarray:
    """Retarded ∫_{t0}^t (t−s) h(s) ds or advanced ∫_t^{t1} (s−t) h(s) ds, as iterated integrals."""
    if side == "retarded":
        return nm.cumulative_integral(nm.cumulative_integral(h, grid.h), grid.h)
    if side == "advanced":
        return nm.reverse_cumulative_integral(nm.reverse_cumulative_integral(h, grid.h), grid.h)
    raise ValueError(f"side must be 'retarded' or 'advanced', got {side!r}")


def green11(F: Section11, side: str = "retarded") -> Section11:
    """G±(f + θh) = G±_{∂t²}(h) + θ G±_{∂t}(f)."""
    if not F.is_compact():
        raise SupportError("Green's operators need support at least 3 cells inside the interval")
    return Section11(F.grid, green_dt2(F.h, F.grid, side), green_dt(F.f, F.grid, side))


def pair11(F1: Section11, F2: Section11) -> float:
    """⟨F1, F2⟩ = ∫ (f1 h2 + h1 f2) dt."""
    F1._check(F2)
    w = F1.grid.weights
    return float(np.dot(w, F1.f * F2.h + F1.h * F2.f))


# -- relative morphisms -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Morphism11:
    """t' ↦ t + λ − ζθ, θ' ↦ θ + ζ from ``source`` into ``target`` over Λₙ.

    λ is even with real body c; ζ is odd.  The reduced map t ↦ t + c must
    carry the source interval into the target interval.
    """

    n: int
    shift: GrassmannElement
    susy: GrassmannElement
    source: Grid11
    target: Grid11

    def __post_init__(self):
        for name, el, want in (("shift", self.shift, 0), ("susy", self.susy, 1)):
            if el.n != self.n:
                raise DimensionError(f"{name} lives over Λ{el.n}, expected Λ{self.n}")
            if el.is_complex:
                raise InvalidMorphismError(f"{name} must be real")
            if not el.is_zero() and el.parity() != want:
                raise InvalidMorphismError(f"{name} must be {'odd' if want else 'even'}")
        if not self.source.compatible(self.target):
            raise GridError("source and target grids need the same spacing")
        c = self.body
        tol = 1e-9 * max(1.0, abs(self.source.h))
        if not (self.target.t0 - self.source.t0 - tol <= c <= self.target.t1 - self.source.t1 + tol):
            raise InvalidMorphismError("the reduced map does not embed the source interval into the target")

    @property
    def body(self) -> float:
        return float(self.shift.body())

    @classmethod
    def make(cls, n: int, c: float = 0.0, zeta: GrassmannElement | None = None,
             nu: GrassmannElement | None = None, *, source: Grid11, target: Grid11 | None = None) -> "Morphism11":
        lam = GrassmannElement.scalar(n, c) + (nu if nu is not None else GrassmannElement.zero(n))
        return cls(n, lam, zeta if zeta is not None else GrassmannElement.zero(n),
                   source, target if target is not None else source)

    @classmethod
    def identity(cls, n: int, grid: Grid11) -> "Morphism11":
        return cls.make(n, 0.0, source=grid)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, source: Grid11, target: Grid11 | None = None,
               *, body: bool = True) -> "Morphism11":
        target = target or source
        lo, hi = target.t0 - source.t0, target.t1 - source.t1
        steps = int(np.floor((hi - lo) / source.h + 1e-9))
        c = lo + source.h * int(rng.integers(0, steps + 1)) if body and steps > 0 else lo
        nu = GrassmannElement.random(n, rng, parity=0).soul()
        zeta = GrassmannElement.random(n, rng, parity=1)
        return cls(n, GrassmannElement.scalar(n, c) + nu, zeta, source, target)

    def compose_after(self, first: "Morphism11") -> "Morphism11":
        """self ∘ first: apply ``first`` then ``self``."""
        if first.n != self.n:
            raise DimensionError("morphisms live over different superpoints")
        if first.target != self.source:
            raise GridError("target of the first morphism must be the source of the second")
        lam = first.shift + self.shift + first.susy * self.susy
        return Morphism11(self.n, lam, first.susy + self.susy, first.source, self.target)

    def inverse_params(self) -> tuple[GrassmannElement, GrassmannElement]:
        return -self.shift, -self.susy

    def exchange(self, lam: GrassmannMorphism) -> "Morphism11":
        if lam.source_n != self.n:
            raise DimensionError("exchange morphism starts at the wrong superpoint")
        return Morphism11(lam.target_n, lam(self.shift), lam(self.susy), self.source, self.target)

    def to_json(self) -> dict:
        return {"model": "1|1", "n": self.n, "shift": self.shift.to_json(), "susy": self.susy.to_json(),
                "source": self.source.to_json(), "target": self.target.to_json()}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Morphism11":
        g = lambda d: Grid11(float(d["t0"]), float(d["t1"]), int(d["N"]))
        src = g(data["source"])
        return cls(int(data["n"]), GrassmannElement.from_json(data["shift"], is_complex=False),
                   GrassmannElement.from_json(data["susy"], is_complex=False), src,
                   g(data["target"]) if "target" in data else src)


def _transport11(H: GrassmannSection, n: int, lam: GrassmannElement, zeta: GrassmannElement,
                 src: Grid11, dst: Grid11) -> GrassmannSection:
    """Sections on ``src`` read at t + λ − ζθ, θ + ζ, sampled on ``dst``."""
    theta = theta_mask(n, 1)
    z = embed_zeta(zeta)
    theta_image = {theta: 1.0, **z}
    nu = {m: c for m, c in lam.soul().coeffs.items()}
    for m, c in mul_terms(z, {theta: 1.0}).items():
        nu[m] = nu.get(m, 0.0) - c
    c = float(lam.body())
    offset = (dst.t0 + c - src.t0) / src.h
    shift = lambda u: nm.shift_open(u, offset, dst.N)
    terms = transport(H.to_superfield(), n, 1, [theta_image], [nu],
                      [lambda u: dt(u, src)], shift)
    return GrassmannSection.from_superfield(n, terms, Section11.zeros(dst))


def pullback11(m: Morphism11, H: GrassmannSection) -> GrassmannSection:
    """χ*(H) for H a Grassmann section over the target interval."""
    if H.n != m.n:
        raise DimensionError(f"section over Λ{H.n}, morphism over Λ{m.n}")
    if H.grid != m.target:
        raise GridError("section must live on the morphism's target grid")
    return _transport11(H, m.n, m.shift, m.susy, m.target, m.source)


def pushforward11(m: Morphism11, H: GrassmannSection) -> GrassmannSection:
    """χ_* = extension by zero ∘ (χ*)⁻¹ for compactly supported H on the source."""
    if H.n != m.n:
        raise DimensionError(f"section over Λ{H.n}, morphism over Λ{m.n}")
    if H.grid != m.source:
        raise GridError("section must live on the morphism's source grid")
    for F in H.terms.values():
        if not F.is_compact():
            raise SupportError("push-forward needs compactly supported sections")
    lam, zeta = m.inverse_params()
    return _transport11(H, m.n, lam, zeta, m.source, m.target)


def relative_P11(H: GrassmannSection) -> GrassmannSection:
    """(id ⊗ P)(ζ^I ⊗ F) = (−1)^{|ζ^I|} ζ^I ⊗ P(F)."""
    return apply_operator(H, apply_P11, P_PARITY)


def relative_Q11(H: GrassmannSection) -> GrassmannSection:
    return apply_operator(H, susy_Q, 1)


def relative_pair11(H1: GrassmannSection, H2: GrassmannSection) -> GrassmannElement:
    """Λₙ-valued pairing: ∫ dt ∂θ of the product in Λₙ ⊗ O(M)."""
    if H1.grid != H2.grid:
        raise GridError("sections live on different grids")
    return berezin_pairing(H1, H2, H1.grid.weights, [1])
