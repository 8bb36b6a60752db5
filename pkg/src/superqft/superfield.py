"""Superfields over Λₙ: sections with n constant odd parameters ζ and k odd coordinates θ.

Everything is done in the combined Grassmann algebra on n + k generators,
with the ζ's first (bits 0..n-1) and the θ's last (bits n..n+k-1).  A
superfield is a dict from combined monomial bitmask to a real array over the
body grid.  θ-derivatives are left derivatives, so Koszul signs between ζ's
and θ's come out of the bit bookkeeping without special cases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, GridError
from .grassmann import GrassmannElement, add_terms, mul_terms, popcount

Terms = dict[int, Any]


def embed_zeta(a: GrassmannElement) -> Terms:
    """A Λₙ element as a constant in the combined algebra (ζ bits unchanged)."""
    return dict(a.coeffs)


def theta_mask(n: int, a: int) -> int:
    """Combined bitmask of θ^a (a is 1-based)."""
    return 1 << (n + a - 1)


def split_mask(mask: int, n: int) -> tuple[int, int]:
    """(ζ part, θ part shifted down to bit 0)."""
    return mask & ((1 << n) - 1), mask >> n


def join_mask(zmask: int, tmask: int, n: int) -> int:
    return zmask | (tmask << n)


def prune(terms: Mapping[int, Any], atol: float = 0.0) -> Terms:
    out = {}
    for m, c in terms.items():
        if np.isscalar(c):
            if abs(c) > atol:
                out[m] = c
        elif np.any(np.abs(c) > atol):
            out[m] = c
    return out


def scale(terms: Mapping[int, Any], s: Any) -> Terms:
    return {m: s * c for m, c in terms.items()}


def left_dtheta(terms: Mapping[int, Any], n: int, a: int) -> Terms:
    """Left derivative ∂/∂θ^a: the sign counts generators standing in front of θ^a."""
    bit = theta_mask(n, a)
    out: Terms = {}
    for m, c in terms.items():
        if m & bit:
            sign = -1 if popcount(m & (bit - 1)) & 1 else 1
            out[m ^ bit] = c if sign > 0 else -c
    return out


def theta_times(terms: Mapping[int, Any], n: int, a: int) -> Terms:
    """Left multiplication by θ^a."""
    return mul_terms({theta_mask(n, a): 1.0}, terms)


def map_arrays(terms: Mapping[int, Any], fn: Callable[[np.ndarray], np.ndarray]) -> Terms:
    return {m: fn(c) for m, c in terms.items()}


def transport(terms: Mapping[int, np.ndarray], n: int, k: int,
              theta_images: Sequence[Mapping[int, float]],
              nu: Sequence[Mapping[int, float]],
              derivs: Sequence[Callable[[np.ndarray], np.ndarray]],
              shift: Callable[[np.ndarray], np.ndarray]) -> Terms:
    """Pull a superfield back along x ↦ x + c + ν, θ^a ↦ θ^a + ε^a.

    ``theta_images[a]`` is the full image of θ^(a+1) (θ plus its odd shift),
    ``nu[α]`` the even nilpotent part of the body-coordinate image, and
    ``shift`` evaluates an array at x + c.  ζ generators are fixed.
    The nilpotent part enters through the finite Taylor series
    Σ_j (ν·∂)^j / j!, which terminates by nilpotency.
    """
    subst: Terms = {}
    for m, c in terms.items():
        zmask, tmask = split_mask(m, n)
        image: Terms = {zmask: 1.0}
        a = 1
        while tmask:
            if tmask & 1:
                image = mul_terms(image, theta_images[a - 1])
            tmask >>= 1
            a += 1
        subst = add_terms(subst, {mm: cc * c for mm, cc in image.items()})
    total = dict(subst)
    term = subst
    for j in range(1, (n + k) // 2 + 2):
        nxt: Terms = {}
        for nu_a, d_a in zip(nu, derivs):
            if not nu_a:
                continue
            nxt = add_terms(nxt, mul_terms(nu_a, map_arrays(term, d_a)))
        term = scale(nxt, 1.0 / j)
        if not term:
            break
        total = add_terms(total, term)
    return map_arrays(total, shift)


@dataclass(frozen=True)
class GrassmannSection:
    """Element Σ_I ζ^I ⊗ F_I of Λₙ ⊗ O(M); ``terms`` maps a ζ-bitmask to a model section.

    Model sections must provide ``to_theta()``, ``from_theta(grid, dict)``,
    ``grid`` and ``parity()``; ``k`` is the number of θ's of the model.
    """

    n: int
    terms: Mapping[int, Any]
    k: int = field(default=1)

    def __post_init__(self):
        for zmask in self.terms:
            if zmask >= 1 << self.n:
                raise DimensionError(f"ζ-monomial {zmask:#b} outside Λ{self.n}")
        grids = {F.grid for F in self.terms.values()}
        if len(grids) > 1:
            raise GridError("all components of a Grassmann section must share one grid")

    @classmethod
    def pure(cls, F, n: int = 0, zeta: GrassmannElement | None = None) -> "GrassmannSection":
        """ζ ⊗ F (or 1 ⊗ F when ζ is omitted)."""
        k = getattr(F, "THETA_COUNT", 1)
        if zeta is None:
            return cls(n, {0: F}, k)
        if zeta.n != n:
            raise DimensionError("ζ lives over the wrong Grassmann algebra")
        return cls(n, {m: F * float(c) for m, c in zeta.coeffs.items()}, k)

    @property
    def grid(self):
        return next(iter(self.terms.values())).grid

    def parity(self) -> int | None:
        seen = set()
        for zmask, F in self.terms.items():
            p = F.parity()
            if p is None:
                return None
            if F.is_zero():
                continue
            seen.add((popcount(zmask) + p) % 2)
        if len(seen) > 1:
            return None
        return seen.pop() if seen else 0

    def to_superfield(self) -> Terms:
        out: Terms = {}
        for zmask, F in self.terms.items():
            for tmask, arr in F.to_theta().items():
                out[join_mask(zmask, tmask, self.n)] = arr
        return out

    @classmethod
    def from_superfield(cls, n: int, terms: Mapping[int, np.ndarray], template) -> "GrassmannSection":
        """Regroup combined-algebra terms by ζ-monomial; ``template`` supplies grid and model."""
        groups: dict[int, dict[int, np.ndarray]] = {}
        for m, c in terms.items():
            zmask, tmask = split_mask(m, n)
            groups.setdefault(zmask, {})[tmask] = c
        if not groups:
            groups[0] = {}
        k = getattr(template, "THETA_COUNT", 1)
        return cls(n, {z: template.from_theta(template.grid, g) for z, g in sorted(groups.items())}, k)

    def component(self, zeta_indices: Sequence[int] = ()):
        from .grassmann import mask_from_indices

        mask, sign = mask_from_indices(zeta_indices, self.n)
        F = self.terms.get(mask)
        if F is None:
            return None
        return F if sign > 0 else F * -1.0

    def map(self, fn: Callable[[int, Any], Any]) -> "GrassmannSection":
        return GrassmannSection(self.n, {z: fn(z, F) for z, F in self.terms.items()}, self.k)

    def __add__(self, other: "GrassmannSection") -> "GrassmannSection":
        if self.n != other.n:
            raise DimensionError("Grassmann levels differ")
        out = dict(self.terms)
        for z, F in other.terms.items():
            out[z] = out[z] + F if z in out else F
        return GrassmannSection(self.n, out, self.k)

    def __sub__(self, other: "GrassmannSection") -> "GrassmannSection":
        return self + other.map(lambda z, F: F * -1.0)

    def max_abs(self) -> float:
        return max((F.max_abs() for F in self.terms.values()), default=0.0)

    def to_json(self) -> dict:
        from .grassmann import indices_of

        return {"n": self.n,
                "terms": [{"zeta": list(indices_of(z)), "section": F.to_json()}
                          for z, F in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "GrassmannSection":
        """Inverse of ``to_json``; a bare model section is read as 1 ⊗ F over Λ₀."""
        from .grassmann import mask_from_indices
        from .model11 import Section11
        from .model32 import Section32

        def section(d):
            return Section32.from_json(d) if d.get("model") == "3|2" else Section11.from_json(d)

        if "terms" not in data:
            return cls.pure(section(data), 0)
        n = int(data["n"])
        terms = {}
        for item in data["terms"]:
            mask, sign = mask_from_indices(item["zeta"], n)
            F = section(item["section"])
            terms[mask] = F if sign > 0 else F * -1.0
        first = next(iter(terms.values()))
        return cls(n, terms, getattr(first, "THETA_COUNT", 1))


def left_multiply(a: GrassmannElement, H: GrassmannSection) -> GrassmannSection:
    """(a ⊗ 1)·H for a constant a ∈ Λₙ."""
    terms = mul_terms(embed_zeta(a), H.to_superfield())
    template = next(iter(H.terms.values()))
    return GrassmannSection.from_superfield(H.n, terms, template)


def apply_operator(H: GrassmannSection, op: Callable[[Any], Any], op_parity: int) -> GrassmannSection:
    """(id ⊗ op)(ζ^I ⊗ F) = (−1)^{|ζ^I||op|} ζ^I ⊗ op(F)."""
    def act(z, F):
        out = op(F)
        return out * -1.0 if (op_parity and popcount(z) & 1) else out
    return H.map(act)


def berezin_pairing(H1: GrassmannSection, H2: GrassmannSection, weights: np.ndarray,
                    integral_order: Sequence[int]) -> GrassmannElement:
    """Λₙ-valued pairing: body integral of the Berezin integral of H1·H2.

    ``integral_order`` lists the θ's whose left derivatives are applied,
    innermost first.  ``weights`` is the body quadrature weight array.
    """
    if H1.n != H2.n:
        raise DimensionError("Grassmann levels differ")
    n = H1.n
    prod = mul_terms(H1.to_superfield(), H2.to_superfield())
    for a in integral_order:
        prod = left_dtheta(prod, n, a)
    coeffs: dict[int, float] = {}
    top = (1 << n) - 1
    for m, c in prod.items():
        if m & ~top:
            continue
        coeffs[m] = coeffs.get(m, 0.0) + float(np.sum(weights * c))
    return GrassmannElement(n, coeffs)

