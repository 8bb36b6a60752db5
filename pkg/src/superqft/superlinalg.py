"""Even morphisms of free Λₙ-supermodules and the Berezinian.

A matrix with Grassmann entries is stored through its monomial expansion
``M = Σ_I ζ^I M_I``, a dict from bitmask to an ordinary numpy matrix.
Scalar coefficients commute with everything, so the product of two such
matrices only needs the Koszul sign of each pair of monomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import DimensionError, InvalidMorphismError, SingularError
from .grassmann import (
    DENSE_MAX_N,
    GrassmannElement,
    GrassmannMorphism,
    indices_of,
    popcount,
    _product_table,
    reorder_sign,
)


def matmul_terms(a: Mapping[int, np.ndarray], b: Mapping[int, np.ndarray]) -> dict[int, np.ndarray]:
    """Product of Grassmann-valued matrices given as {monomial: matrix}."""
    if len(a) * len(b) > 4:
        n = max(max(a), max(b)).bit_length()
        if n <= DENSE_MAX_N:
            return _dense_matmul(n, a, b)
    out: dict[int, np.ndarray] = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            s = reorder_sign(ma, mb)
            if s == 0:
                continue
            term = ca @ cb if s > 0 else -(ca @ cb)
            m = ma | mb
            out[m] = out[m] + term if m in out else term
    return out


def _dense_matmul(n: int, a: Mapping[int, np.ndarray], b: Mapping[int, np.ndarray]) -> dict[int, np.ndarray]:
    """Batched version of the monomial double loop; one matmul over all disjoint pairs."""
    size = 1 << n
    ca, cb = next(iter(a.values())), next(iter(b.values()))
    dtype = np.result_type(ca, cb)
    A = np.zeros((size,) + ca.shape, dtype)
    B = np.zeros((size,) + cb.shape, dtype)
    hasA, hasB = np.zeros(size, bool), np.zeros(size, bool)
    for m, c in a.items():
        A[m], hasA[m] = c, True
    for m, c in b.items():
        B[m], hasB[m] = c, True
    ia, ib, tgt, sign = _product_table(n)
    sel = hasA[ia] & hasB[ib]
    ia, ib, tgt, sign = ia[sel], ib[sel], tgt[sel], sign[sel]
    prods = (A[ia] @ B[ib]) * sign[:, None, None]
    out = np.zeros((size, ca.shape[0], cb.shape[1]), dtype)
    np.add.at(out, tgt, prods)
    return {int(m): out[m] for m in np.unique(tgt)}


def _prune(terms: Mapping[int, np.ndarray]) -> dict[int, np.ndarray]:
    return {m: c for m, c in terms.items() if np.count_nonzero(c)}


def nilpotent_inverse(body: np.ndarray, soul: Mapping[int, np.ndarray], n: int) -> dict[int, np.ndarray]:
    """Inverse of ``body + soul`` by a Neumann series that terminates at degree n."""
    if body.shape[0] != body.shape[1]:
        raise DimensionError("only square matrices are invertible")
    if body.size and abs(np.linalg.det(body)) < 1e-300:
        raise SingularError("body matrix is singular")
    try:
        b_inv = np.linalg.inv(body) if body.size else body.copy()
    except np.linalg.LinAlgError as exc:
        raise SingularError("body matrix is singular") from exc
    x = {m: -(b_inv @ c) for m, c in soul.items() if m}
    total: dict[int, np.ndarray] = {0: np.eye(body.shape[0], dtype=b_inv.dtype)}
    power: dict[int, np.ndarray] = dict(total)
    for _ in range(n):
        power = _prune(matmul_terms(power, x))
        if not power:
            break
        for m, c in power.items():
            total[m] = total[m] + c if m in total else c
    return matmul_terms(total, {0: b_inv})


def _body_det(a: np.ndarray):
    """Determinant of an ordinary matrix; closed form up to 3×3 so small exact inputs stay exact."""
    k = a.shape[0]
    if k == 1:
        return a[0, 0]
    if k == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if k == 3:
        return (a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
                - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
                + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]))
    return np.linalg.det(a)


def grassmann_det(terms: Mapping[int, np.ndarray], n: int, *, is_complex: bool = False) -> GrassmannElement:
    """Determinant of a square matrix with even Grassmann entries.

    det(M) = det(M₀) · exp(tr log(I + M₀⁻¹ N)), the series cut off once the
    powers of the nilpotent part vanish.
    """
    body = terms.get(0)
    if body is None:
        raise SingularError("matrix has zero body")
    k = body.shape[0]
    if k == 0:
        return GrassmannElement.scalar(n, 1.0, is_complex=is_complex)
    det0 = _body_det(body)
    if det0 == 0:
        raise SingularError("body matrix is singular")
    b_inv = np.linalg.inv(body)
    x = {m: b_inv @ c for m, c in terms.items() if m}
    log_tr: dict[int, Any] = {}
    power: dict[int, np.ndarray] = {0: np.eye(k)}
    for j in range(1, n // 2 + 1):
        power = _prune(matmul_terms(power, x))
        if not power:
            break
        coef = (-1) ** (j + 1) / j
        for m, c in power.items():
            log_tr[m] = log_tr.get(m, 0.0) + coef * np.trace(c)
    exponent = GrassmannElement(n, log_tr, is_complex=is_complex)
    return exponent.exp() * (complex(det0) if is_complex else float(np.real(det0)))


def leibniz_det(entries: Sequence[Sequence[GrassmannElement]]) -> GrassmannElement:
    """Permutation-sum determinant for commuting (even) entries; used as an oracle."""
    from itertools import permutations

    k = len(entries)
    if k == 0:
        raise DimensionError("empty matrix")
    n = entries[0][0].n
    total = GrassmannElement.zero(n, is_complex=entries[0][0].is_complex)
    for perm in permutations(range(k)):
        inversions = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        term = GrassmannElement.scalar(n, -1.0 if inversions % 2 else 1.0, is_complex=total.is_complex)
        for row, col in enumerate(perm):
            term = term * entries[row][col]
        total = total + term
    return total


@dataclass(frozen=True)
class SuperMatrix:
    """Even map Λₙ^{p|q} → Λₙ^{r|s} in block form [[L1, L2], [L3, L4]].

    ``terms`` maps a monomial bitmask to an (r+s)×(p+q) numpy matrix.
    Even monomials may only populate the diagonal blocks, odd ones only the
    off-diagonal blocks.
    """

    n: int
    src: tuple[int, int]
    tgt: tuple[int, int]
    terms: Mapping[int, np.ndarray]
    is_complex: bool = False

    def __post_init__(self):
        p, q = self.src
        r, s = self.tgt
        shape = (r + s, p + q)
        clean = {}
        dtype = complex if self.is_complex else float
        for m, c in self.terms.items():
            c = np.asarray(c)
            if not self.is_complex and np.iscomplexobj(c):
                if np.any(c.imag != 0):
                    raise DimensionError("complex entries in a real super matrix")
                c = c.real
            c = c.astype(dtype)
            if c.shape != shape:
                raise DimensionError(f"block matrix shape {c.shape}, expected {shape}")
            if m >= 1 << self.n:
                raise DimensionError(f"monomial {m:#b} outside Λ{self.n}")
            if popcount(m) % 2 == 0:
                bad = np.count_nonzero(c[:r, p:]) or np.count_nonzero(c[r:, :p])
            else:
                bad = np.count_nonzero(c[:r, :p]) or np.count_nonzero(c[r:, p:])
            if bad:
                raise InvalidMorphismError("block parity pattern violated: the matrix is not even")
            if np.count_nonzero(c):
                clean[m] = c
        object.__setattr__(self, "terms", clean)

    # -- constructors -----------------------------------------------------
    @classmethod
    def identity(cls, n: int, p: int, q: int, *, is_complex: bool = False) -> "SuperMatrix":
        return cls(n, (p, q), (p, q), {0: np.eye(p + q)}, is_complex)

    @classmethod
    def from_entries(cls, n: int, src: tuple[int, int], tgt: tuple[int, int],
                     entries: Sequence[Sequence[GrassmannElement]]) -> "SuperMatrix":
        r, s = tgt
        p, q = src
        is_complex = any(e.is_complex for row in entries for e in row)
        dtype = complex if is_complex else float
        terms: dict[int, np.ndarray] = {}
        if len(entries) != r + s or any(len(row) != p + q for row in entries):
            raise DimensionError("entry table does not match the block dimensions")
        for i, row in enumerate(entries):
            for j, e in enumerate(row):
                if e.n != n:
                    raise DimensionError(f"entry ({i},{j}) lives over Λ{e.n}, expected Λ{n}")
                for m, c in e.coeffs.items():
                    if m not in terms:
                        terms[m] = np.zeros((r + s, p + q), dtype=dtype)
                    terms[m][i, j] = c
        return cls(n, src, tgt, terms, is_complex)

    @classmethod
    def from_blocks(cls, n: int, L1, L2, L3, L4) -> "SuperMatrix":
        """Blocks given as nested lists of GrassmannElements (possibly empty)."""
        r, p = len(L1), len(L1[0]) if L1 else (len(L3[0]) if L3 else 0)
        s, q = len(L4), len(L4[0]) if L4 else (len(L2[0]) if L2 else 0)
        rows = [list(L1[i]) + list(L2[i]) if L2 else list(L1[i]) for i in range(r)]
        rows += [(list(L3[i]) if L3 else []) + list(L4[i]) for i in range(s)]
        return cls.from_entries(n, (p, q), (r, s), rows)

    @classmethod
    def random(cls, n: int, p: int, q: int, rng: np.random.Generator, *,
               invertible: bool = True, scale: float = 1.0) -> "SuperMatrix":
        k = p + q
        terms = {}
        for m in range(1 << n):
            c = rng.uniform(-1, 1, size=(k, k)) * (1.0 if m == 0 else scale)
            if popcount(m) % 2 == 0:
                c[:p, p:] = 0
                c[p:, :p] = 0
            else:
                c[:p, :p] = 0
                c[p:, p:] = 0
            terms[m] = c
        if invertible:
            terms[0] = terms[0] + 3.0 * np.eye(k)
        return cls(n, (p, q), (p, q), terms)

    # -- access -----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.tgt[0] + self.tgt[1], self.src[0] + self.src[1])

    def entry(self, i: int, j: int) -> GrassmannElement:
        return GrassmannElement(self.n, {m: c[i, j] for m, c in self.terms.items()},
                                is_complex=self.is_complex)

    def entries(self) -> list[list[GrassmannElement]]:
        rows, cols = self.shape
        return [[self.entry(i, j) for j in range(cols)] for i in range(rows)]

    def body(self) -> np.ndarray:
        return self.terms.get(0, np.zeros(self.shape, dtype=complex if self.is_complex else float))

    def blocks(self) -> tuple[dict, dict, dict, dict]:
        p, _ = self.src
        r, _ = self.tgt
        cut = lambda rs, cs: {m: c[rs, cs] for m, c in self.terms.items() if np.count_nonzero(c[rs, cs])}
        return (cut(slice(None, r), slice(None, p)), cut(slice(None, r), slice(p, None)),
                cut(slice(r, None), slice(None, p)), cut(slice(r, None), slice(p, None)))

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(c))) for c in self.terms.values()), default=0.0)

    def _check(self, other: "SuperMatrix") -> None:
        if self.n != other.n:
            raise DimensionError(f"generator counts differ: {self.n} vs {other.n}")

    # -- algebra ----------------------------------------------------------
    def __matmul__(self, other: "SuperMatrix") -> "SuperMatrix":
        self._check(other)
        if self.src != other.tgt:
            raise DimensionError(f"inner dimensions differ: {self.src} vs {other.tgt}")
        cplx = self.is_complex or other.is_complex
        return SuperMatrix(self.n, other.src, self.tgt, matmul_terms(self.terms, other.terms), cplx)

    def __add__(self, other: "SuperMatrix") -> "SuperMatrix":
        self._check(other)
        if (self.src, self.tgt) != (other.src, other.tgt):
            raise DimensionError("shapes differ")
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return SuperMatrix(self.n, self.src, self.tgt, out, self.is_complex or other.is_complex)

    def __neg__(self) -> "SuperMatrix":
        return SuperMatrix(self.n, self.src, self.tgt, {m: -c for m, c in self.terms.items()}, self.is_complex)

    def __sub__(self, other: "SuperMatrix") -> "SuperMatrix":
        return self + (-other)

    def allclose(self, other: "SuperMatrix", atol: float = 1e-12) -> bool:
        if (self.n, self.src, self.tgt) != (other.n, other.src, other.tgt):
            return False
        return (self - other).max_abs() <= atol

    def inverse(self) -> "SuperMatrix":
        if self.src != self.tgt:
            raise DimensionError("only square (p|q)→(p|q) matrices are invertible")
        terms = nilpotent_inverse(self.body(), self.terms, self.n)
        return SuperMatrix(self.n, self.src, self.tgt, terms, self.is_complex)

    def berezinian(self) -> GrassmannElement:
        """Ber = det(L1 − L2 L4⁻¹ L3) · det(L4)⁻¹."""
        if self.src != self.tgt:
            raise DimensionError("Berezinian needs a square (p|q)→(p|q) matrix")
        p, q = self.src
        L1, L2, L3, L4 = self.blocks()
        n = self.n
        one = GrassmannElement.scalar(n, 1.0, is_complex=self.is_complex)
        if q == 0:
            return grassmann_det(_with_body(L1, p), n, is_complex=self.is_complex) if p else one
        L4_body = L4.get(0, np.zeros((q, q)))
        L4_inv = nilpotent_inverse(L4_body, L4, n)
        det4 = grassmann_det(_with_body(L4, q), n, is_complex=self.is_complex)
        if p == 0:
            return det4.inverse()
        schur = dict(L1)
        for m, c in matmul_terms(matmul_terms(L2, L4_inv), L3).items():
            schur[m] = schur[m] - c if m in schur else -c
        det1 = grassmann_det(_with_body(_prune(schur), p), n, is_complex=self.is_complex)
        return det1 * det4.inverse()

    def exchange(self, lam: GrassmannMorphism) -> "SuperMatrix":
        """Entrywise pullback along a Grassmann algebra morphism."""
        if lam.source_n != self.n:
            raise DimensionError(f"matrix over Λ{self.n}, morphism expects Λ{lam.source_n}")
        out: dict[int, np.ndarray] = {}
        for m, c in self.terms.items():
            image = GrassmannElement.scalar(lam.target_n, 1.0)
            for i in indices_of(m):
                image = image * lam.images[i - 1]
            for mm, cc in image.coeffs.items():
                out[mm] = out[mm] + cc * c if mm in out else cc * c
        return SuperMatrix(lam.target_n, self.src, self.tgt, out, self.is_complex)

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {"n": self.n, "src": list(self.src), "tgt": list(self.tgt),
                "entries": [[e.to_json() for e in row] for row in self.entries()]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SuperMatrix":
        n = int(data["n"])
        rows = [[GrassmannElement.from_json(e) for e in row] for row in data["entries"]]
        if any(e.is_complex for row in rows for e in row):
            rows = [[e.complexify() for e in row] for row in rows]
        return cls.from_entries(n, tuple(data["src"]), tuple(data["tgt"]), rows)


def _with_body(terms: Mapping[int, np.ndarray], k: int) -> dict[int, np.ndarray]:
    out = dict(terms)
    if 0 not in out:
        out[0] = np.zeros((k, k))
    return out


def smat_mul(a: SuperMatrix, b: SuperMatrix) -> SuperMatrix:
    return a @ b


def smat_inverse(a: SuperMatrix) -> SuperMatrix:
    return a.inverse()


def berezinian(a: SuperMatrix) -> GrassmannElement:
    return a.berezinian()


def smat_exchange(lam: GrassmannMorphism, a: SuperMatrix) -> SuperMatrix:
    return a.exchange(lam)
