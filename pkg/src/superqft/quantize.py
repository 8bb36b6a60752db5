"""The super-*-algebra generated by smeared fields, modulo the SCCR/SCAR relation.

Generators are registered sections with a fixed total order (their ids).  A
product is brought to normal form with the quadratic rule

    v_i v_j  →  −s (−1)^{|v_i||v_j|} v_j v_i + β τ(v_i, v_j) 𝟙      (i > j)

where s = (−1)^{dim S + 1}.  Coefficients are kept as exact Gaussian
rationals (every double is a rational), so normal forms reached along
different rewriting paths can be compared for exact equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .dynamics import FieldTheoryHandle, causally_disjoint, support_box, tau
from .errors import DimensionError, PreconditionError, SupportError, UnsupportedError
from .grassmann import GrassmannElement, indices_of, popcount, reorder_sign

TAU_SNAP = 1e-10


@dataclass(frozen=True)
class GaussQ:
    """Exact complex rational re + i·im."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(x: Any) -> "GaussQ":
        if isinstance(x, GaussQ):
            return x
        z = complex(x)
        return GaussQ(Fraction(z.real), Fraction(z.imag))

    def __add__(self, o: "GaussQ") -> "GaussQ":
        return GaussQ(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "GaussQ") -> "GaussQ":
        return GaussQ(self.re - o.re, self.im - o.im)

    def __neg__(self) -> "GaussQ":
        return GaussQ(-self.re, -self.im)

    def __mul__(self, o: "GaussQ") -> "GaussQ":
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def conj(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


ONE = GaussQ(Fraction(1))
ZERO = GaussQ()

Coeff = dict[int, GaussQ]   # Λₙ element: monomial mask -> exact scalar
Word = tuple[int, ...]


def _coeff_add(a: Coeff, b: Coeff) -> Coeff:
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, ZERO) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def _coeff_mul(a: Coeff, b: Coeff) -> Coeff:
    out: Coeff = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            s = reorder_sign(ma, mb)
            if s == 0:
                continue
            term = ca * cb if s > 0 else -(ca * cb)
            out = _coeff_add(out, {ma | mb: term})
    return out


def _coeff_scale(a: Coeff, s: GaussQ) -> Coeff:
    return {m: c * s for m, c in a.items() if c * s}


def _coeff_from(el: GrassmannElement) -> Coeff:
    return {m: GaussQ.of(c) for m, c in el.coeffs.items() if c != 0}


def _coeff_to(n: int, c: Coeff) -> GrassmannElement:
    return GrassmannElement(n, {m: complex(v) for m, v in c.items()}, is_complex=True)


# -- generators --------------------------------------------------------------

class GeneratorRegistry:
    """Field generators of one theory, their parities and a cached τ table.

    Sections are stored per parity; a new section that is a linear
    combination of stored ones of the same parity is expressed through them,
    so Φ is linear on the nose.
    """

    def __init__(self, th: FieldTheoryHandle, *, dedup_rtol: float = 1e-12):
        self.th = th
        self.sections: list[Any] = []
        self.parities: list[int] = []
        self._tau: dict[tuple[int, int], GaussQ] = {}
        self.dedup_rtol = dedup_rtol

    def __len__(self) -> int:
        return len(self.sections)

    @staticmethod
    def _vec(F) -> np.ndarray:
        return np.concatenate([np.ravel(a) for a in F.to_theta().values()])

    def express(self, F) -> dict[int, float]:
        """Generator coefficients of a homogeneous section, registering it if new."""
        if F.is_zero():
            return {}
        p = F.parity()
        if p is None:
            raise DimensionError("generators must be homogeneous; split the section first")
        ids = [i for i, q in enumerate(self.parities) if q == p]
        v = self._vec(F)
        if ids:
            A = np.stack([self._vec(self.sections[i]) for i in ids], axis=1)
            x, *_ = np.linalg.lstsq(A, v, rcond=None)
            if np.linalg.norm(A @ x - v) <= self.dedup_rtol * np.linalg.norm(v):
                return {i: float(c) for i, c in zip(ids, x) if abs(c) > self.dedup_rtol}
        self.sections.append(F)
        self.parities.append(p)
        return {len(self.sections) - 1: 1.0}

    def tau(self, i: int, j: int) -> GaussQ:
        key = (i, j)
        if key not in self._tau:
            val = tau(self.th, self.sections[i], self.sections[j])
            self._tau[key] = ZERO if abs(val) < TAU_SNAP else GaussQ.of(val)
        return self._tau[key]

    def word_parity(self, w: Word) -> int:
        return sum(self.parities[i] for i in w) % 2


# -- rewriting ---------------------------------------------------------------

def _free_square(reg: GeneratorRegistry, i: int) -> bool:
    """v² is left alone when the relation at v1 = v2 = v reads 0 = 0."""
    return reg.th.swap_sign * (-1) ** reg.parities[i] != 1


def _find_redex(reg: GeneratorRegistry, w: Word, strategy: str) -> int | None:
    positions = range(len(w) - 1) if strategy == "left" else range(len(w) - 2, -1, -1)
    for k in positions:
        a, b = w[k], w[k + 1]
        if a > b or (a == b and not _free_square(reg, a)):
            return k
    return None


def normal_form(reg: GeneratorRegistry, word: Word, strategy: str = "left") -> dict[Word, GaussQ]:
    """Rewrite a word into a combination of normal words (ids non-decreasing)."""
    beta = GaussQ.of(reg.th.beta)
    s = reg.th.swap_sign
    pending: dict[Word, GaussQ] = {tuple(word): ONE}
    done: dict[Word, GaussQ] = {}
    while pending:
        w, c = pending.popitem()
        k = _find_redex(reg, w, strategy)
        if k is None:
            total = done.get(w, ZERO) + c
            if total:
                done[w] = total
            else:
                done.pop(w, None)
            continue
        a, b = w[k], w[k + 1]
        rest = w[:k] + w[k + 2:]
        if a == b:
            # 2 v² = β τ(v, v) 𝟙
            contrib = [(rest, c * beta * reg.tau(a, a) * GaussQ(Fraction(1, 2)))]
        else:
            sign = -s * (-1) ** (reg.parities[a] * reg.parities[b])
            contrib = [(w[:k] + (b, a) + w[k + 2:], c * GaussQ(Fraction(sign))),
                       (rest, c * beta * reg.tau(a, b))]
        for ww, cc in contrib:
            if cc:
                tot = pending.get(ww, ZERO) + cc
                if tot:
                    pending[ww] = tot
                else:
                    pending.pop(ww, None)
    return done


def is_normal(reg: GeneratorRegistry, w: Word) -> bool:
    return _find_redex(reg, w, "left") is None


# -- algebra elements --------------------------------------------------------

class AlgebraElement:
    """Λₙ^C-linear combination of normal words; the empty word is 𝟙."""

    __slots__ = ("n", "reg", "terms")

    def __init__(self, n: int, reg: GeneratorRegistry, terms: Mapping[Word, Coeff] | None = None):
        self.n = n
        self.reg = reg
        self.terms = {w: c for w, c in (terms or {}).items() if c}

    @classmethod
    def unit(cls, n: int, reg: GeneratorRegistry, coeff: GrassmannElement | complex = 1.0) -> "AlgebraElement":
        c = _coeff_from(coeff) if isinstance(coeff, GrassmannElement) else {0: GaussQ.of(coeff)}
        return cls(n, reg, {(): c})

    @classmethod
    def zero(cls, n: int, reg: GeneratorRegistry) -> "AlgebraElement":
        return cls(n, reg, {})

    @classmethod
    def from_words(cls, n: int, reg: GeneratorRegistry,
                   words: Mapping[Word, GrassmannElement | complex], strategy: str = "left") -> "AlgebraElement":
        """Sum of arbitrary (not necessarily normal) words, reduced to normal form."""
        out = cls.zero(n, reg)
        for w, c in words.items():
            coeff = _coeff_from(c) if isinstance(c, GrassmannElement) else {0: GaussQ.of(c)}
            nf = normal_form(reg, tuple(w), strategy)
            out = out + AlgebraElement(n, reg, {u: _coeff_scale(coeff, a) for u, a in nf.items()})
        return out

    def _check(self, other: "AlgebraElement") -> None:
        if self.reg is not other.reg:
            raise DimensionError("elements belong to different theories")
        if self.n != other.n:
            raise DimensionError(f"superpoint levels differ: {self.n} vs {other.n}")

    def coeff(self, word: Word = ()) -> GrassmannElement:
        return _coeff_to(self.n, self.terms.get(tuple(word), {}))

    def words(self) -> list[Word]:
        return sorted(self.terms)

    def parity(self) -> int | None:
        ps = {(self.reg.word_parity(w) + popcount(m)) % 2 for w, c in self.terms.items() for m in c}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = _coeff_add(out.get(w, {}), c)
        return AlgebraElement(self.n, self.reg, out)

    def __neg__(self) -> "AlgebraElement":
        return self.scale(-1.0)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, s: complex) -> "AlgebraElement":
        g = GaussQ.of(s)
        return AlgebraElement(self.n, self.reg, {w: _coeff_scale(c, g) for w, c in self.terms.items()})

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return alg_mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.reg is other.reg and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return id(self)

    def max_abs(self) -> float:
        return max((abs(complex(v)) for c in self.terms.values() for v in c.values()), default=0.0)

    def __repr__(self) -> str:
        parts = []
        for w in self.words():
            parts.append(f"{_coeff_to(self.n, self.terms[w])!r}·{list(w) or '𝟙'}")
        return "AlgebraElement(" + " + ".join(parts) + ")" if parts else "AlgebraElement(0)"

    def to_json(self) -> dict:
        return {"n": self.n, "terms": [{"word": list(w), "coeff": _coeff_to(self.n, self.terms[w]).to_json()}
                                       for w in self.words()]}


def alg_mul(a: AlgebraElement, b: AlgebraElement, strategy: str = "left") -> AlgebraElement:
    """(c₁ w₁)(c₂ w₂) = (−1)^{|w₁||c₂|} c₁c₂ · NF(w₁w₂)."""
    a._check(b)
    reg = a.reg
    out: dict[Word, Coeff] = {}
    for w1, c1 in a.terms.items():
        p1 = reg.word_parity(w1)
        for w2, c2 in b.terms.items():
            c2s = {m: (-v if p1 and popcount(m) & 1 else v) for m, v in c2.items()}
            c = _coeff_mul(c1, c2s)
            if not c:
                continue
            for u, s in normal_form(reg, w1 + w2, strategy).items():
                out[u] = _coeff_add(out.get(u, {}), _coeff_scale(c, s))
    return AlgebraElement(a.n, reg, out)


def alg_star(a: AlgebraElement) -> AlgebraElement:
    """(c ⊗ v₁…v_k)* = c̄ ⊗ (graded reversal of the word), then normal form."""
    reg = a.reg
    out = AlgebraElement.zero(a.n, reg)
    for w, c in a.terms.items():
        odd = sum(reg.parities[i] for i in w)
        sign = -1 if (odd * (odd - 1) // 2) % 2 else 1
        cc = {m: (v.conj() if sign > 0 else -v.conj()) for m, v in c.items()}
        nf = normal_form(reg, tuple(reversed(w)))
        out = out + AlgebraElement(a.n, reg, {u: _coeff_scale(cc, s) for u, s in nf.items()})
    return out


# -- fields and checks ------------------------------------------------------

def _homogeneous_parts(F):
    parts = []
    if hasattr(F, "f"):
        from .model11 import Section11
        parts = [Section11.even(F.grid, F.f), Section11.odd(F.grid, F.h)]
    else:
        from .model32 import Section32
        parts = [Section32.make(F.grid, phi=F.phi, eta=F.eta), Section32.make(F.grid, psi=F.psi)]
    return [p for p in parts if not p.is_zero()]


def field(F, reg: GeneratorRegistry, n: int = 0) -> AlgebraElement:
    """Φ(F) = [F]: a combination of single-letter words."""
    if not F.is_compact():
        raise SupportError("Φ is only defined on compactly supported sections")
    terms: dict[Word, Coeff] = {}
    for part in _homogeneous_parts(F):
        for i, c in reg.express(part).items():
            terms[(i,)] = _coeff_add(terms.get((i,), {}), {0: GaussQ.of(c)})
    return AlgebraElement(n, reg, terms)


def enriched_field(zeta: GrassmannElement, F, reg: GeneratorRegistry) -> AlgebraElement:
    """Φ_{M/ptₙ}(ζ ⊗ F) = (ζ ⊗ 𝟙) · Φ(F)."""
    base = field(F, reg, zeta.n)
    return AlgebraElement(zeta.n, reg, {w: _coeff_mul(_coeff_from(zeta), c) for w, c in base.terms.items()})


def graded_commutator(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """a b + s (−1)^{|a||b|} b a with s = (−1)^{dim S + 1}."""
    pa, pb = a.parity(), b.parity()
    if pa is None or pb is None:
        raise DimensionError("graded commutator needs homogeneous arguments")
    s = a.reg.th.swap_sign * (-1) ** (pa * pb)
    return alg_mul(a, b) + alg_mul(b, a).scale(s)


def check_causality(F1, F2, reg: GeneratorRegistry) -> dict:
    """Graded (anti)commutator of Φ(F1), Φ(F2) for causally disjoint supports."""
    th = reg.th
    s1, s2 = support_box(th, F1), support_box(th, F2)
    if not causally_disjoint(th, s1, s2):
        raise PreconditionError("supports are not causally disjoint")
    if s1 is None or s2 is None:
        return {"tau": 0.0, "zero": True, "commutator": AlgebraElement.zero(0, reg)}
    a, b = field(F1, reg), field(F2, reg)
    comm = graded_commutator(a, b)
    raw = tau(th, F1, F2)
    return {"tau": raw, "zero": comm.is_zero(), "commutator": comm}


def check_eom(F, reg: GeneratorRegistry, tests: Sequence[Any]) -> float:
    """max |τ(PF, G_i)| over a test family: Φ(PF) vanishes in the weak sense."""
    PF = reg.th.apply_P(F)
    return float(max((abs(tau(reg.th, PF, Gi)) for Gi in tests), default=0.0))


def susy_hat(a: AlgebraElement, q_action: Callable, reg: GeneratorRegistry) -> AlgebraElement:
    """Odd superderivation with Q̂(Φ(F)) = −Φ(Q F) and Q̂(c ⊗ w) = (−1)^{|c|} c ⊗ Q̂(w)."""
    th = reg.th
    if not th.flat:
        raise UnsupportedError("supersymmetry needs a flat background")
    letter_image: dict[int, AlgebraElement] = {}

    def image(i: int) -> AlgebraElement:
        if i not in letter_image:
            letter_image[i] = field(q_action(reg.sections[i]), reg, a.n).scale(-1.0)
        return letter_image[i]

    out = AlgebraElement.zero(a.n, reg)
    for w, c in a.terms.items():
        for k in range(len(w)):
            left = AlgebraElement(a.n, reg, {w[:k]: {0: ONE}})
            right = AlgebraElement(a.n, reg, {w[k + 1:]: {0: ONE}})
            sign = -1 if sum(reg.parities[i] for i in w[:k]) % 2 else 1
            term = alg_mul(alg_mul(left, image(w[k])), right)
            for m, v in c.items():
                cs = v if (sign * (-1) ** popcount(m)) > 0 else -v
                out = out + AlgebraElement(a.n, reg, {u: _coeff_mul({m: cs}, cu) for u, cu in term.terms.items()})
    return out


def word_element(reg: GeneratorRegistry, word: Word, n: int = 0, strategy: str = "left") -> AlgebraElement:
    """A single (possibly unordered) word, reduced to normal form."""
    return AlgebraElement.from_words(n, reg, {tuple(word): 1.0}, strategy)
