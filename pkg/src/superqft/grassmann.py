"""Exact arithmetic in real and complex Grassmann algebras.

Monomials are stored as integer bitmasks: bit ``i - 1`` stands for the
generator with 1-based index ``i``.  Products carry the Koszul sign of
sorting the concatenated generator list, counted by transpositions.

The low-level helpers (:func:`reorder_sign`, :func:`mul_terms`) accept any
coefficient type with ``+``, ``-`` and ``*``, so the same code multiplies
scalar Grassmann numbers and superfields whose coefficients are numpy arrays.
"""

from __future__ import annotations

import math
import numbers
from functools import lru_cache
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, InvalidMorphismError, SingularError

MAX_GENERATORS = 16
DENSE_PRODUCT_PAIRS = 48   # operand term-count product above which the dense table is used
DENSE_MAX_N = 8


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=1 << 16)
def reorder_sign(a: int, b: int) -> int:
    """Sign picked up by the monomial product ``a * b``; 0 if they overlap."""
    if a & b:
        return 0
    swaps = 0
    rest = b
    while rest:
        low = rest & -rest
        swaps += popcount(a & ~((low << 1) - 1))
        rest ^= low
    return -1 if swaps & 1 else 1


def mask_from_indices(indices: Iterable[int], n: int) -> tuple[int, int]:
    """Return ``(mask, sign)`` for the ordered product of 1-based generators."""
    mask, sign = 0, 1
    for i in indices:
        if not 1 <= i <= n:
            raise DimensionError(f"generator index {i} outside 1..{n}")
        bit = 1 << (i - 1)
        s = reorder_sign(mask, bit)
        if s == 0:
            return 0, 0
        sign *= s
        mask |= bit
    return mask, sign


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mul_terms(a: Mapping[int, Any], b: Mapping[int, Any]) -> dict[int, Any]:
    """Product of two monomial expansions with Koszul signs."""
    out: dict[int, Any] = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            if ma & mb:
                continue
            s = reorder_sign(ma, mb)
            term = ca * cb if s > 0 else -(ca * cb)
            m = ma | mb
            out[m] = out[m] + term if m in out else term
    return out


@lru_cache(maxsize=None)
def _product_table(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Index pairs (a, b) of disjoint monomials over n generators, a|b and the sign."""
    size = 1 << n
    a, b = np.divmod(np.arange(size * size), size)
    keep = (a & b) == 0
    a, b = a[keep], b[keep]
    sign = np.array([reorder_sign(int(x), int(y)) for x, y in zip(a, b)], dtype=float)
    return a, b, a | b, sign


def _dense_mul(n: int, a: Mapping[int, Any], b: Mapping[int, Any], is_complex: bool) -> dict[int, Any]:
    """Scalar-coefficient product through a dense sign table; used for large operands."""
    size = 1 << n
    dtype = complex if is_complex else float
    A, B = np.zeros(size, dtype), np.zeros(size, dtype)
    A[list(a)] = list(a.values())
    B[list(b)] = list(b.values())
    ia, ib, tgt, sign = _product_table(n)
    vals = sign * A[ia] * B[ib]
    out = np.bincount(tgt, vals.real, size)
    if is_complex:
        out = out + 1j * np.bincount(tgt, vals.imag, size)
    nz = np.nonzero(out)[0]
    return dict(zip(nz.tolist(), out[nz].tolist()))


def add_terms(a: Mapping[int, Any], b: Mapping[int, Any], scale: Any = 1) -> dict[int, Any]:
    out = dict(a)
    for m, c in b.items():
        term = c if scale == 1 else scale * c
        out[m] = out[m] + term if m in out else term
    return out


def _is_complex_scalar(x: Any) -> bool:
    return isinstance(x, (complex, np.complexfloating)) and x.imag != 0


class GrassmannElement:
    """Element of the Grassmann algebra on ``n`` odd generators.

    ``coeffs`` maps a generator bitmask to a real or complex scalar; missing
    masks are zero.  Instances are treated as immutable.
    """

    __slots__ = ("n", "coeffs", "is_complex")

    def __init__(self, n: int, coeffs: Mapping[int, Any] | None = None, *, is_complex: bool = False):
        if not 0 <= n <= MAX_GENERATORS:
            raise DimensionError(f"generator count {n} outside 0..{MAX_GENERATORS}")
        self.n = n
        self.is_complex = bool(is_complex)
        cast = complex if self.is_complex else float
        clean: dict[int, Any] = {}
        limit = 1 << n
        for m, c in (coeffs or {}).items():
            if not 0 <= m < limit:
                raise DimensionError(f"monomial {m:#b} not a subset of {n} generators")
            if not self.is_complex and _is_complex_scalar(c):
                raise DimensionError("complex coefficient in a real Grassmann element")
            c = cast(c.real) if not self.is_complex and isinstance(c, complex) else cast(c)
            if c != 0:
                clean[m] = c
        self.coeffs = clean

    # -- constructors -----------------------------------------------------
    @classmethod
    def scalar(cls, n: int, value: Any = 1.0, *, is_complex: bool = False) -> "GrassmannElement":
        return cls(n, {0: value}, is_complex=is_complex)

    @classmethod
    def zero(cls, n: int, *, is_complex: bool = False) -> "GrassmannElement":
        return cls(n, {}, is_complex=is_complex)

    @classmethod
    def generator(cls, n: int, i: int, *, is_complex: bool = False) -> "GrassmannElement":
        mask, _ = mask_from_indices([i], n)
        return cls(n, {mask: 1.0}, is_complex=is_complex)

    @classmethod
    def from_terms(cls, n: int, terms: Mapping[Sequence[int], Any], *, is_complex: bool = False) -> "GrassmannElement":
        """Build from ``{(i, j, ...): coeff}`` with 1-based generator indices in any order."""
        coeffs: dict[int, Any] = {}
        for idx, c in terms.items():
            mask, sign = mask_from_indices(idx, n)
            if sign:
                coeffs[mask] = coeffs.get(mask, 0) + sign * c
        return cls(n, coeffs, is_complex=is_complex)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, *, parity: int | None = None,
               is_complex: bool = False, density: float = 1.0) -> "GrassmannElement":
        coeffs = {}
        for m in range(1 << n):
            if parity is not None and popcount(m) % 2 != parity:
                continue
            if density < 1.0 and rng.random() > density:
                continue
            c = rng.uniform(-1, 1)
            if is_complex:
                c = complex(c, rng.uniform(-1, 1))
            coeffs[m] = c
        return cls(n, coeffs, is_complex=is_complex)

    # -- structure --------------------------------------------------------
    def _check(self, other: "GrassmannElement") -> None:
        if self.n != other.n:
            raise DimensionError(f"generator counts differ: {self.n} vs {other.n}")
        if self.is_complex != other.is_complex:
            raise DimensionError("real and complex Grassmann elements cannot be mixed")

    def _like(self, coeffs: Mapping[int, Any]) -> "GrassmannElement":
        return GrassmannElement(self.n, coeffs, is_complex=self.is_complex)

    def _trusted(self, coeffs: Mapping[int, Any]) -> "GrassmannElement":
        # coefficients built from already validated elements of the same kind
        out = object.__new__(GrassmannElement)
        out.n = self.n
        out.is_complex = self.is_complex
        out.coeffs = {m: c for m, c in coeffs.items() if c != 0}
        return out

    def complexify(self) -> "GrassmannElement":
        return GrassmannElement(self.n, self.coeffs, is_complex=True)

    def real_part(self) -> "GrassmannElement":
        return GrassmannElement(self.n, {m: c.real for m, c in self.coeffs.items()})

    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements (zero counts as even), else ``None``."""
        parities = {popcount(m) & 1 for m in self.coeffs}
        if not parities:
            return 0
        return parities.pop() if len(parities) == 1 else None

    def even_part(self) -> "GrassmannElement":
        return self._like({m: c for m, c in self.coeffs.items() if popcount(m) % 2 == 0})

    def odd_part(self) -> "GrassmannElement":
        return self._like({m: c for m, c in self.coeffs.items() if popcount(m) % 2 == 1})

    def body(self) -> Any:
        return self.coeffs.get(0, 0.0)

    def soul(self) -> "GrassmannElement":
        return self._like({m: c for m, c in self.coeffs.items() if m})

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def coeff(self, indices: Sequence[int] = ()) -> Any:
        mask, sign = mask_from_indices(indices, self.n)
        return sign * self.coeffs.get(mask, 0.0)

    def terms(self) -> dict[tuple[int, ...], Any]:
        return {indices_of(m): c for m, c in sorted(self.coeffs.items())}

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: Any) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            self._check(other)
            return self._trusted(add_terms(self.coeffs, other.coeffs))
        if isinstance(other, numbers.Number):
            return self + GrassmannElement.scalar(self.n, other, is_complex=self.is_complex)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> "GrassmannElement":
        return self._trusted({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: Any) -> "GrassmannElement":
        if isinstance(other, (GrassmannElement, numbers.Number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other: Any) -> "GrassmannElement":
        return (-self) + other

    def __mul__(self, other: Any) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            self._check(other)
            if self.n <= DENSE_MAX_N and len(self.coeffs) * len(other.coeffs) > DENSE_PRODUCT_PAIRS:
                return self._trusted(_dense_mul(self.n, self.coeffs, other.coeffs, self.is_complex))
            return self._trusted(mul_terms(self.coeffs, other.coeffs))
        if isinstance(other, numbers.Number):
            if not self.is_complex:
                if _is_complex_scalar(other):
                    raise DimensionError("complex scalar times a real Grassmann element")
                other = float(np.real(other))
            return self._trusted({m: other * c for m, c in self.coeffs.items()})
        return NotImplemented

    def __rmul__(self, other: Any) -> "GrassmannElement":
        if isinstance(other, numbers.Number):
            return self * other
        return NotImplemented

    def __truediv__(self, other: numbers.Number) -> "GrassmannElement":
        return self * (1.0 / other)

    def __pow__(self, k: int) -> "GrassmannElement":
        out = GrassmannElement.scalar(self.n, 1.0, is_complex=self.is_complex)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrassmannElement):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.n, tuple(sorted(self.coeffs.items()))))

    def allclose(self, other: "GrassmannElement", atol: float = 1e-12) -> bool:
        if self.n != other.n:
            return False
        return (self - other if self.is_complex == other.is_complex
                else self.complexify() - other.complexify()).max_abs() <= atol

    def star(self) -> "GrassmannElement":
        """Coefficient-wise complex conjugation."""
        if not self.is_complex:
            return self
        return self._like({m: c.conjugate() for m, c in self.coeffs.items()})

    def inverse(self) -> "GrassmannElement":
        b = self.body()
        if b == 0:
            raise SingularError("element with zero body is not invertible")
        u = self.soul() / b
        out = GrassmannElement.scalar(self.n, 1.0, is_complex=self.is_complex)
        term = out
        for _ in range(self.n):
            term = term * (-u)
            if term.is_zero():
                break
            out = out + term
        return out / b

    def exp(self) -> "GrassmannElement":
        """Exponential of an even element (finite series in the soul)."""
        if self.odd_part().coeffs:
            raise DimensionError("exp is only defined here for even elements")
        b = self.body()
        u = self.soul()
        out = GrassmannElement.scalar(self.n, 1.0, is_complex=self.is_complex)
        term = out
        for k in range(1, self.n // 2 + 1):
            term = term * u / k
            if term.is_zero():
                break
            out = out + term
        scale = np.exp(b) if self.is_complex else math.exp(b)
        return out * scale

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"GrassmannElement(n={self.n}, 0)"
        parts = []
        for m, c in sorted(self.coeffs.items()):
            label = "".join(f"θ{i}" for i in indices_of(m)) or "1"
            parts.append(f"{c:+.6g}·{label}")
        return f"GrassmannElement(n={self.n}, {' '.join(parts)})"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "n": self.n,
            "coeffs": [
                {"idx": list(indices_of(m)), "re": float(np.real(c)), "im": float(np.imag(c))}
                for m, c in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any], *, is_complex: bool | None = None) -> "GrassmannElement":
        n = int(data["n"])
        entries = data.get("coeffs", [])
        if is_complex is None:
            is_complex = any(float(e.get("im", 0.0)) != 0.0 for e in entries)
        terms: dict[tuple[int, ...], Any] = {}
        for e in entries:
            c = complex(e.get("re", 0.0), e.get("im", 0.0)) if is_complex else float(e.get("re", 0.0))
            terms[tuple(e["idx"])] = c
        return cls.from_terms(n, terms, is_complex=is_complex)


def gr_mul(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    return a * b


def gr_star(a: GrassmannElement) -> GrassmannElement:
    return a.star()


class GrassmannMorphism:
    """Unit-preserving superalgebra map from Λ_source to Λ_target.

    It is fixed by the (odd) images of the source generators.  Viewed as a
    map of superpoints it points the other way, from ``pt_target`` to
    ``pt_source``.
    """

    __slots__ = ("source_n", "target_n", "images")

    def __init__(self, source_n: int, target_n: int, images: Sequence[GrassmannElement]):
        if len(images) != source_n:
            raise InvalidMorphismError(f"need {source_n} generator images, got {len(images)}")
        for k, img in enumerate(images, start=1):
            if img.n != target_n:
                raise DimensionError(f"image of generator {k} lives over Λ{img.n}, expected Λ{target_n}")
            if img.parity() != 1 and not img.is_zero():
                raise InvalidMorphismError(f"image of generator {k} is not odd")
        self.source_n = source_n
        self.target_n = target_n
        self.images = tuple(img if not img.is_complex else img for img in images)

    @classmethod
    def identity(cls, n: int) -> "GrassmannMorphism":
        return cls(n, n, [GrassmannElement.generator(n, i) for i in range(1, n + 1)])

    @classmethod
    def body_map(cls, n: int, target_n: int = 0) -> "GrassmannMorphism":
        """Send every generator to zero."""
        return cls(n, target_n, [GrassmannElement.zero(target_n) for _ in range(n)])

    @classmethod
    def random(cls, source_n: int, target_n: int, rng: np.random.Generator) -> "GrassmannMorphism":
        return cls(source_n, target_n,
                   [GrassmannElement.random(target_n, rng, parity=1) for _ in range(source_n)])

    def apply(self, a: GrassmannElement) -> GrassmannElement:
        if a.n != self.source_n:
            raise DimensionError(f"element over Λ{a.n}, morphism expects Λ{self.source_n}")
        images = [img.complexify() if a.is_complex else img for img in self.images]
        one = GrassmannElement.scalar(self.target_n, 1.0, is_complex=a.is_complex)
        cache = {0: one}

        def image(m: int) -> GrassmannElement:
            # image of a monomial, built from the image of its lower generators
            if m not in cache:
                top = m.bit_length()
                cache[m] = image(m ^ (1 << (top - 1))) * images[top - 1]
            return cache[m]

        terms: dict[int, Any] = {}
        for m, c in a.coeffs.items():
            terms = add_terms(terms, image(m).coeffs, c)
        return one._trusted(terms)

    __call__ = apply

    def compose(self, inner: "GrassmannMorphism") -> "GrassmannMorphism":
        """Algebra-map composite ``self ∘ inner``."""
        if inner.target_n != self.source_n:
            raise DimensionError("cannot compose: intermediate generator counts differ")
        return GrassmannMorphism(inner.source_n, self.target_n, [self.apply(img) for img in inner.images])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrassmannMorphism):
            return NotImplemented
        return (self.source_n, self.target_n, self.images) == (other.source_n, other.target_n, other.images)

    def __repr__(self) -> str:
        return f"GrassmannMorphism(Λ{self.source_n} -> Λ{self.target_n}, {list(self.images)})"

    def to_json(self) -> dict:
        return {"source_n": self.source_n, "target_n": self.target_n,
                "images": [img.to_json() for img in self.images]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "GrassmannMorphism":
        return cls(int(data["source_n"]), int(data["target_n"]),
                   [GrassmannElement.from_json(d, is_complex=False) for d in data["images"]])


def gr_pullback(m: GrassmannMorphism, a: GrassmannElement) -> GrassmannElement:
    return m.apply(a)
