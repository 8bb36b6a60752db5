"""Flat 3|2 Wess-Zumino model: F = φ + ψ_a θ^a + η θ²/2 on a periodic (x, y) box.

Conventions used throughout:

* γ₀ = σ₂, γ₁ = iσ₁, γ₂ = iσ₃, C = γ₀, metric diag(1, −1, −1);
* spinor-index gammas γ^α_{ab} = i (γ^α C⁻¹)_{ab}; h^α_{ab} = i γ^α_{ab} is real;
* ε_{12} = ε^{12} = 1, indices raised as ψ^a = ε^{ab} ψ_b;
* θ² = −2 θ¹θ², so in the θ-basis a section is {1: φ, θ¹: ψ₁, θ²: ψ₂, θ¹θ²: −η}.

P acts on components as (φ, ψ, η) ↦ (mφ − η, (i∇̸ + m)ψ, □φ + mη).
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
    add_terms,
    berezin_pairing,
    embed_zeta,
    left_dtheta,
    map_arrays,
    theta_mask,
    theta_times,
    transport,
)

P_PARITY = 0
TIME_MARGIN = 3

# -- gamma algebra ------------------------------------------------------------

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
METRIC = np.diag([1.0, -1.0, -1.0])
GAMMA_LOWER = (SIGMA2, 1j * SIGMA1, 1j * SIGMA3)
GAMMA_UPPER = tuple(METRIC[a, a] * g for a, g in enumerate(GAMMA_LOWER))
C = SIGMA2.copy()
C_INV = np.linalg.inv(C)
EPS_LOWER = np.array([[0.0, 1.0], [-1.0, 0.0]])
EPS_UPPER = np.array([[0.0, 1.0], [-1.0, 0.0]])

#: γ^α_{ab} with the spinor indices down
GAMMA_SPINOR = np.array([1j * (g @ C_INV) for g in GAMMA_UPPER])
#: h^α_{ab} = i γ^α_{ab}, real and symmetric in (a, b)
H_SPINOR = np.real_if_close(1j * GAMMA_SPINOR).real
#: (i∇̸ψ)_c = Σ_α (K^α)_{cb} ∂_α ψ_b
DIRAC_K = np.array([-(H_SPINOR[a] @ EPS_UPPER) for a in range(3)])
#: η feeds the ψ_b slot of Q_B(F) as Σ_a QB_ETA_TO_PSI[b, a] B^a η
QB_ETA_TO_PSI = np.array([[0.0, 1.0], [-1.0, 0.0]])


def levi_civita3(a: int, b: int, c: int) -> int:
    return int(np.sign((b - a) * (c - b) * (c - a))) if len({a, b, c}) == 3 else 0


def verify_clifford(rng: np.random.Generator | None = None) -> dict[str, bool]:
    """Evaluate the gamma-matrix identities; each entry is an exact pass/fail."""
    rng = rng or np.random.default_rng(0)
    I2 = np.eye(2)
    g, gu = GAMMA_LOWER, GAMMA_UPPER
    report: dict[str, bool] = {}
    report["clifford"] = all(
        np.array_equal(g[a] @ g[b] + g[b] @ g[a], 2 * METRIC[a, b] * I2) for a in range(3) for b in range(3))
    report["gamma0_squared"] = np.array_equal(g[0] @ g[0], I2)
    report["C_antisymmetric"] = np.array_equal(C.T, -C)
    report["gamma_transpose"] = all(np.allclose(g[a].T, -C @ g[a] @ C_INV, atol=0, rtol=0) for a in range(3))
    # γ_{αβ} := ½[γ_α, γ_β] = i ε_{αβδ} γ^δ
    ok = True
    for a in range(3):
        for b in range(3):
            lhs = 0.5 * (g[a] @ g[b] - g[b] @ g[a])
            rhs = sum(1j * levi_civita3(a, b, d) * gu[d] for d in range(3))
            ok &= np.array_equal(lhs, rhs)
    report["gamma_ab_dual"] = bool(ok)
    report["traceless"] = all(np.trace(g[a]) == 0 for a in range(3)) and all(
        np.trace(g[a] @ g[b] - g[b] @ g[a]) == 0 for a in range(3) for b in range(3))
    report["gammaCinv_symmetric"] = all(np.array_equal(x, x.T) for x in (gu[a] @ C_INV for a in range(3)))
    report["gammaCinv_real"] = all(np.all((gu[a] @ C_INV).imag == 0) for a in range(3))
    report["epsilon_inverse"] = np.array_equal(EPS_UPPER @ EPS_LOWER, -I2)
    report["spinor_gamma_imaginary"] = bool(np.all(GAMMA_SPINOR.real == 0))
    # completeness: L = ½Tr(L) id + ½Tr(L γ_α) γ^α
    ok = True
    for _ in range(8):
        L = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rebuilt = 0.5 * np.trace(L) * I2 + sum(0.5 * np.trace(L @ g[a]) * gu[a] for a in range(3))
        ok &= np.allclose(rebuilt, L, rtol=0, atol=1e-14)
    report["completeness"] = bool(ok)
    return report


# -- grid and sections --------------------------------------------------------

@dataclass(frozen=True)
class Grid32:
    """Nt time levels from t0 with step cfl·min(Δx, Δy); periodic Nx × Ny box of size Lx × Ly."""

    Nt: int
    Nx: int
    Ny: int
    Lx: float = 2 * np.pi
    Ly: float = 2 * np.pi
    mass: float = 1.0
    cfl: float = 0.5
    t0: float = 0.0

    def __post_init__(self):
        if min(self.Nt, self.Nx, self.Ny) < nm.MIN_POINTS:
            raise GridError(f"every axis needs at least {nm.MIN_POINTS} points")
        if self.mass < 0:
            raise GridError("mass must be non-negative")
        if not 0 < self.cfl <= 1 / np.sqrt(2):
            raise GridError(f"CFL number {self.cfl} outside the leapfrog stability range (0, 1/√2]")

    @property
    def dx(self) -> float:
        return self.Lx / self.Nx

    @property
    def dy(self) -> float:
        return self.Ly / self.Ny

    @property
    def dt(self) -> float:
        return self.cfl * min(self.dx, self.dy)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.Nt, self.Nx, self.Ny)

    def coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        t = self.t0 + self.dt * np.arange(self.Nt)
        x = self.dx * np.arange(self.Nx)
        y = self.dy * np.arange(self.Ny)
        return np.meshgrid(t, x, y, indexing="ij")

    @property
    def weights(self) -> np.ndarray:
        wt = nm.trapezoid_weights(self.Nt, self.dt)
        return wt[:, None, None] * np.full((self.Nx, self.Ny), self.dx * self.dy)[None]

    def refine(self, factor: int = 2) -> "Grid32":
        return Grid32((self.Nt - 1) * factor + 1, self.Nx * factor, self.Ny * factor,
                      self.Lx, self.Ly, self.mass, self.cfl, self.t0)

    def to_json(self) -> dict:
        return {"Nt": self.Nt, "Nx": self.Nx, "Ny": self.Ny, "Lx": self.Lx, "Ly": self.Ly,
                "mass": self.mass, "cfl": self.cfl, "t0": self.t0}


@dataclass(frozen=True, eq=False)
class Section32:
    grid: Grid32
    phi: np.ndarray
    psi: np.ndarray  # shape (2, Nt, Nx, Ny), lower spinor index
    eta: np.ndarray

    THETA_COUNT = 2

    def __post_init__(self):
        shp = self.grid.shape
        phi = np.asarray(self.phi, dtype=float)
        psi = np.asarray(self.psi, dtype=float)
        eta = np.asarray(self.eta, dtype=float)
        if phi.shape != shp or eta.shape != shp or psi.shape != (2,) + shp:
            raise GridError(f"component arrays must have shape {shp} (ψ: (2, *{shp}))")
        for a in (phi, psi, eta):
            a.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def zeros(cls, grid: Grid32) -> "Section32":
        z = np.zeros(grid.shape)
        return cls(grid, z, np.zeros((2,) + grid.shape), z)

    @classmethod
    def make(cls, grid: Grid32, phi=None, psi=None, eta=None) -> "Section32":
        z = np.zeros(grid.shape)
        return cls(grid, z if phi is None else phi, np.zeros((2,) + grid.shape) if psi is None else psi,
                   z if eta is None else eta)

    def to_theta(self) -> dict[int, np.ndarray]:
        return {0: self.phi, 1: self.psi[0], 2: self.psi[1], 3: -self.eta}

    @classmethod
    def from_theta(cls, grid: Grid32, terms: Mapping[int, np.ndarray]) -> "Section32":
        z = np.zeros(grid.shape)
        return cls(grid, terms.get(0, z), np.stack([terms.get(1, z), terms.get(2, z)]), -terms.get(3, z))

    def parity(self) -> int | None:
        even = np.any(self.phi != 0) or np.any(self.eta != 0)
        odd = np.any(self.psi != 0)
        if even and odd:
            return None
        return 1 if odd else 0

    def is_zero(self) -> bool:
        return self.max_abs() == 0

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.phi)), np.max(np.abs(self.psi)), np.max(np.abs(self.eta))))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.phi**2) + np.sum(self.psi**2) + np.sum(self.eta**2)))

    def magnitude(self) -> np.ndarray:
        return np.maximum.reduce([np.abs(self.phi), np.abs(self.psi[0]), np.abs(self.psi[1]), np.abs(self.eta)])

    def time_support(self, rtol: float = 1e-13) -> tuple[int, int] | None:
        mag = self.magnitude().max(axis=(1, 2))
        if mag.max() == 0:
            return None
        idx = np.nonzero(mag > rtol * mag.max())[0]
        return int(idx[0]), int(idx[-1])

    def is_compact(self, margin: int = TIME_MARGIN) -> bool:
        s = self.time_support()
        return s is None or (s[0] >= margin and s[1] <= self.grid.Nt - 1 - margin)

    def interior(self, skip: int = 2) -> "Section32":
        """Copy with the first and last ``skip`` time slices zeroed."""
        mask = np.zeros(self.grid.Nt)
        mask[skip:self.grid.Nt - skip] = 1
        m = mask[:, None, None]
        return Section32(self.grid, self.phi * m, self.psi * m[None], self.eta * m)

    def _check(self, other: "Section32") -> None:
        if self.grid != other.grid:
            raise GridError("sections live on different grids")

    def __add__(self, other: "Section32") -> "Section32":
        self._check(other)
        return Section32(self.grid, self.phi + other.phi, self.psi + other.psi, self.eta + other.eta)

    def __sub__(self, other: "Section32") -> "Section32":
        self._check(other)
        return Section32(self.grid, self.phi - other.phi, self.psi - other.psi, self.eta - other.eta)

    def __mul__(self, s: float) -> "Section32":
        return Section32(self.grid, s * self.phi, s * self.psi, s * self.eta)

    __rmul__ = __mul__

    def __neg__(self) -> "Section32":
        return self * -1.0

    def to_json(self) -> dict:
        return {"model": "3|2", "grid": self.grid.to_json(), "shape": list(self.grid.shape),
                "phi": self.phi.ravel().tolist(), "psi1": self.psi[0].ravel().tolist(),
                "psi2": self.psi[1].ravel().tolist(), "eta": self.eta.ravel().tolist()}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Section32":
        if data.get("model") != "3|2":
            raise DimensionError(f"expected a 3|2 section, got {data.get('model')}")
        grid = Grid32(**data["grid"])
        r = lambda k: np.asarray(data[k], dtype=float).reshape(grid.shape)
        return cls(grid, r("phi"), np.stack([r("psi1"), r("psi2")]), r("eta"))


# -- difference operators ----------------------------------------------------

def d_t(u: np.ndarray, grid: Grid32) -> np.ndarray:
    return nm.derivative(u, grid.dt, order=1, accuracy=2, axis=0)


def d_x(u: np.ndarray, grid: Grid32) -> np.ndarray:
    return (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2 * grid.dx)


def d_y(u: np.ndarray, grid: Grid32) -> np.ndarray:
    return (np.roll(u, -1, axis=2) - np.roll(u, 1, axis=2)) / (2 * grid.dy)


def derivs(grid: Grid32):
    return (lambda u: d_t(u, grid), lambda u: d_x(u, grid), lambda u: d_y(u, grid))


def laplacian(u: np.ndarray, grid: Grid32) -> np.ndarray:
    """Five-point periodic Laplacian acting on the last two axes."""
    return ((np.roll(u, -1, -2) - 2 * u + np.roll(u, 1, -2)) / grid.dx**2
            + (np.roll(u, -1, -1) - 2 * u + np.roll(u, 1, -1)) / grid.dy**2)


def box(u: np.ndarray, grid: Grid32, *, scheme: str = "compact") -> np.ndarray:
    """□ = ∂t² − ∂x² − ∂y²; ``compact`` uses 3-point stencils, ``product`` squares D0."""
    if scheme == "compact":
        return nm.derivative(u, grid.dt, order=2, accuracy=2, axis=0) - laplacian(u, grid)
    if scheme == "product":
        dt_, dx_, dy_ = derivs(grid)
        return dt_(dt_(u)) - dx_(dx_(u)) - dy_(dy_(u))
    raise ValueError(f"unknown □ scheme {scheme!r}")


def dirac(psi: np.ndarray, grid: Grid32) -> np.ndarray:
    """i∇̸ψ with centred differences; ψ has shape (2, Nt, Nx, Ny)."""
    out = np.zeros_like(psi)
    for alpha, d in enumerate(derivs(grid)):
        dpsi = np.stack([d(psi[0]), d(psi[1])])
        out += np.einsum("cb,b...->c...", DIRAC_K[alpha], dpsi)
    return out


def apply_P32(F: Section32, *, scheme: str = "compact") -> Section32:
    """(φ, ψ, η) ↦ (mφ − η, (i∇̸ + m)ψ, □φ + mη)."""
    g, m = F.grid, F.grid.mass
    return Section32(g, m * F.phi - F.eta, dirac(F.psi, g) + m * F.psi, box(F.phi, g, scheme=scheme) + m * F.eta)


def spinor_derivative(terms: Mapping[int, np.ndarray], n: int, a: int, grid: Grid32) -> dict:
    """D_a = ∂_a + h^α_{ab} θ^b ∂_α in the combined algebra with n leading ζ's."""
    out = left_dtheta(terms, n, a)
    for alpha, d in enumerate(derivs(grid)):
        dterms = map_arrays(terms, d)
        for b in (1, 2):
            coef = H_SPINOR[alpha, a - 1, b - 1]
            if coef:
                out = add_terms(out, theta_times(dterms, n, b), coef)
    return out


def apply_P32_superspace(F: Section32) -> Section32:
    """P = ½ ε^{ab} D_b D_a + m evaluated on the θ-expansion, all derivatives D0."""
    terms = F.to_theta()
    out = {k: F.grid.mass * v for k, v in terms.items()}
    for a in (1, 2):
        Da = spinor_derivative(terms, 0, a, F.grid)
        for b in (1, 2):
            if EPS_UPPER[a - 1, b - 1]:
                out = add_terms(out, spinor_derivative(Da, 0, b, F.grid), 0.5 * EPS_UPPER[a - 1, b - 1])
    return Section32.from_theta(F.grid, out)


def dirac_factorization_residual(psi: np.ndarray, grid: Grid32) -> float:
    """‖(i∇̸+m)(i∇̸−m)ψ + (□+m²)ψ‖ / ‖(□+m²)ψ‖ on interior time slices."""
    m = grid.mass
    lhs = dirac(dirac(psi, grid) - m * psi, grid) + m * (dirac(psi, grid) - m * psi)
    rhs = np.stack([box(p, grid) + m * m * p for p in psi])
    sl = (slice(None), slice(2, grid.Nt - 2))
    return float(np.max(np.abs(lhs + rhs)[sl]) / np.max(np.abs(rhs)[sl]))


# -- Green's operators -------------------------------------------------------

def kg_solve(f: np.ndarray, grid: Grid32, side: str) -> np.ndarray:
    """Leapfrog solution of (□ + m²)u = f, zero data at the start (retarded) or end (advanced)."""
    if side not in ("retarded", "advanced"):
        raise ValueError(f"side must be 'retarded' or 'advanced', got {side!r}")
    if not np.any(f):
        return np.zeros_like(f)
    src = f if side == "retarded" else f[::-1]
    dt2, m2 = grid.dt**2, grid.mass**2
    cx, cy = dt2 / grid.dx**2, dt2 / grid.dy**2
    u = np.zeros_like(src)
    lap = np.empty(src.shape[1:])
    for k in range(1, grid.Nt - 1):
        w = u[k]
        lap[...] = (2 - 2 * cx - 2 * cy - dt2 * m2) * w
        lap[1:] += cx * w[:-1]
        lap[0] += cx * w[-1]
        lap[:-1] += cx * w[1:]
        lap[-1] += cx * w[0]
        lap[:, 1:] += cy * w[:, :-1]
        lap[:, 0] += cy * w[:, -1]
        lap[:, :-1] += cy * w[:, 1:]
        lap[:, -1] += cy * w[:, 0]
        u[k + 1] = lap - u[k - 1] + dt2 * src[k]
    return u if side == "retarded" else u[::-1]


def green32(F: Section32, side: str = "retarded") -> Section32:
    """(φ, ψ, η) ↦ (m Gφ + Gη, −(i∇̸ − m) Gψ, −□Gφ + m Gη) with G the Klein-Gordon Green's operator."""
    if not F.is_compact():
        raise SupportError(f"support must stay {TIME_MARGIN} time levels away from both ends")
    g, m = F.grid, F.grid.mass
    Gphi = kg_solve(F.phi, g, side)
    Geta = kg_solve(F.eta, g, side)
    Gpsi = np.stack([kg_solve(p, g, side) for p in F.psi])
    return Section32(g, m * Gphi + Geta, -(dirac(Gpsi, g) - m * Gpsi), -box(Gphi, g) + m * Geta)


def _dilate_l1(mask: np.ndarray) -> np.ndarray:
    out = mask.copy()
    for axis in (-2, -1):
        out |= np.roll(mask, 1, axis) | np.roll(mask, -1, axis)
    return out


def cone_mask(support: np.ndarray, side: str = "retarded", margin: int = 2) -> np.ndarray:
    """Numerical causal future (or past) of a boolean space-time support.

    The leapfrog stencil reaches one cell further in L1 distance per step;
    ``margin`` extra cells and one extra level cover the difference
    operators applied after the solve.
    """
    s = support if side == "retarded" else support[::-1]
    cone = np.zeros_like(s, dtype=bool)
    for k in range(s.shape[0]):
        cone[k] = s[k] | (_dilate_l1(cone[k - 1]) if k else False)
    for _ in range(margin):
        cone = _dilate_l1(cone)
    cone[:-1] |= cone[1:]
    return cone if side == "retarded" else cone[::-1]


def pair32(F1: Section32, F2: Section32) -> float:
    """∫ vol (φ₁η₂ + φ₂η₁ + ψ₁^a ψ₂_a) with ψ^a = ε^{ab} ψ_b."""
    F1._check(F2)
    raised = np.einsum("ab,b...->a...", EPS_UPPER, F1.psi)
    dens = F1.phi * F2.eta + F2.phi * F1.eta + np.sum(raised * F2.psi, axis=0)
    return float(np.sum(F1.grid.weights * dens))


def relative_pair32(H1: GrassmannSection, H2: GrassmannSection) -> GrassmannElement:
    """Λₙ-valued pairing through the Berezin integral ∂θ¹∂θ² of the product."""
    if H1.grid != H2.grid:
        raise GridError("sections live on different grids")
    return berezin_pairing(H1, H2, H1.grid.weights, [2, 1])


# -- supersymmetry ------------------------------------------------------------

def susy_QB(F: Section32, B) -> Section32:
    """Q_B = B^a ∂_a − B^a h^α_{ab} θ^b ∂_α on components.

    φ-slot: B^a ψ_a;  ψ_b-slot: −B^a h^α_{ab} ∂_α φ + QB_ETA_TO_PSI[b, a] B^a η;
    η-slot: B^a h^α_{ab} ε^{bc} ∂_α ψ_c = −B^a (i∇̸ψ)_a.
    """
    B = np.asarray(B, dtype=float)
    g = F.grid
    phi_out = B[0] * F.psi[0] + B[1] * F.psi[1]
    grads = [d(F.phi) for d in derivs(g)]
    psi_out = np.zeros_like(F.psi)
    for b in range(2):
        for alpha in range(3):
            psi_out[b] -= (B @ H_SPINOR[alpha][:, b]) * grads[alpha]
        psi_out[b] += (QB_ETA_TO_PSI[b] @ B) * F.eta
    eta_out = -np.einsum("a,a...->...", B, dirac(F.psi, g))
    return Section32(g, phi_out, psi_out, eta_out)


def susy_QB_superspace(terms: Mapping[int, np.ndarray], n: int, B, grid: Grid32) -> dict:
    """Q_B on a combined-algebra superfield, for cross-checking the component table."""
    out: dict = {}
    for a in (1, 2):
        if B[a - 1]:
            out = add_terms(out, left_dtheta(terms, n, a), B[a - 1])
    for alpha, d in enumerate(derivs(grid)):
        dterms = map_arrays(terms, d)
        for b in (1, 2):
            coef = -sum(B[a] * H_SPINOR[alpha, a, b - 1] for a in range(2))
            if coef:
                out = add_terms(out, theta_times(dterms, n, b), coef)
    return out


@dataclass(frozen=True, eq=False)
class Morphism32:
    """x^α ↦ x^α + λ^α − ε^a h^α_{ab} θ^b, θ^a ↦ θ^a + ε^a over Λₙ.

    A supersymmetry transformation with constant spinor B and parameter ζ has
    ε^a = B^a ζ.  General odd ε^a are kept so the family is closed under
    composition.
    """

    n: int
    translation: tuple[GrassmannElement, GrassmannElement, GrassmannElement]
    eps: tuple[GrassmannElement, GrassmannElement]
    grid: Grid32

    def __post_init__(self):
        if len(self.translation) != 3 or len(self.eps) != 2:
            raise DimensionError("need three translation and two spinor parameters")
        for el in self.translation:
            if el.n != self.n or (not el.is_zero() and el.parity() != 0) or el.is_complex:
                raise InvalidMorphismError("translations must be real even elements of Λₙ")
        for el in self.eps:
            if el.n != self.n or (not el.is_zero() and el.parity() != 1) or el.is_complex:
                raise InvalidMorphismError("spinor parameters must be real odd elements of Λₙ")

    @classmethod
    def susy(cls, n: int, grid: Grid32, B=(1.0, 0.0), zeta: GrassmannElement | None = None,
             translation=(0.0, 0.0, 0.0)) -> "Morphism32":
        zeta = zeta if zeta is not None else GrassmannElement.zero(n)
        tr = tuple(x if isinstance(x, GrassmannElement) else GrassmannElement.scalar(n, float(x))
                   for x in translation)
        return cls(n, tr, (zeta * float(B[0]), zeta * float(B[1])), grid)

    @classmethod
    def identity(cls, n: int, grid: Grid32) -> "Morphism32":
        return cls.susy(n, grid)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, grid: Grid32, *, max_time_cells: int = 2,
               max_space_cells: int = 4) -> "Morphism32":
        body = (grid.dt * int(rng.integers(-max_time_cells, max_time_cells + 1)),
                grid.dx * int(rng.integers(-max_space_cells, max_space_cells + 1)),
                grid.dy * int(rng.integers(-max_space_cells, max_space_cells + 1)))
        tr = tuple(GrassmannElement.scalar(n, c) + GrassmannElement.random(n, rng, parity=0).soul() * 0.05
                   for c in body)
        eps = tuple(GrassmannElement.random(n, rng, parity=1) * 0.05 for _ in range(2))
        return cls(n, tr, eps, grid)

    def compose_after(self, first: "Morphism32") -> "Morphism32":
        """self ∘ first: λ = λ₁ + λ₂ − h^α_{ab} ε₂^a ε₁^b, ε = ε₁ + ε₂."""
        if first.n != self.n or first.grid != self.grid:
            raise DimensionError("morphisms live over different superpoints or grids")
        tr = []
        for alpha in range(3):
            lam = first.translation[alpha] + self.translation[alpha]
            for a in range(2):
                for b in range(2):
                    coef = H_SPINOR[alpha, a, b]
                    if coef:
                        lam = lam - (self.eps[a] * first.eps[b]) * coef
            tr.append(lam)
        return Morphism32(self.n, tuple(tr), (first.eps[0] + self.eps[0], first.eps[1] + self.eps[1]), self.grid)

    def inverse(self) -> "Morphism32":
        return Morphism32(self.n, tuple(-x for x in self.translation), tuple(-e for e in self.eps), self.grid)

    def exchange(self, lam: GrassmannMorphism) -> "Morphism32":
        if lam.source_n != self.n:
            raise DimensionError("exchange morphism starts at the wrong superpoint")
        return Morphism32(lam.target_n, tuple(lam(x) for x in self.translation),
                          tuple(lam(e) for e in self.eps), self.grid)

    def to_json(self) -> dict:
        return {"model": "3|2", "n": self.n, "grid": self.grid.to_json(),
                "translation": [x.to_json() for x in self.translation],
                "eps": [e.to_json() for e in self.eps]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "Morphism32":
        el = lambda d: GrassmannElement.from_json(d, is_complex=False)
        return cls(int(data["n"]), tuple(el(d) for d in data["translation"]),
                   tuple(el(d) for d in data["eps"]), Grid32(**data["grid"]))


def _transport32(H: GrassmannSection, n: int, translation, eps, grid: Grid32) -> GrassmannSection:
    theta_images = []
    for a in (1, 2):
        img = {theta_mask(n, a): 1.0}
        img.update(embed_zeta(eps[a - 1]))
        theta_images.append(img)
    nu = []
    for alpha in range(3):
        part = dict(translation[alpha].soul().coeffs)
        for a in range(2):
            for b in range(2):
                coef = H_SPINOR[alpha, a, b]
                if coef:
                    for m, c in mul_terms(embed_zeta(eps[a]), {theta_mask(n, b + 1): 1.0}).items():
                        part[m] = part.get(m, 0.0) - coef * c
        nu.append({m: c for m, c in part.items() if c != 0})
    ct, cx, cy = (float(x.body()) for x in translation)
    offs = (ct / grid.dt, cx / grid.dx, cy / grid.dy)

    def shift(u):
        u = nm.shift_open(u, offs[0], axis=0)
        u = nm.shift_periodic(u, offs[1], axis=1)
        return nm.shift_periodic(u, offs[2], axis=2)

    for F in H.terms.values():
        s = F.time_support()
        if s is not None and offs[0] != 0 and (s[0] - offs[0] < TIME_MARGIN or s[1] - offs[0] > grid.Nt - 1 - TIME_MARGIN):
            raise SupportError("the time translation moves the support off the grid")
    terms = transport(H.to_superfield(), n, 2, theta_images, nu, derivs(grid), shift)
    return GrassmannSection.from_superfield(n, terms, Section32.zeros(grid))


def pullback32(m: Morphism32, H: GrassmannSection) -> GrassmannSection:
    if H.n != m.n:
        raise DimensionError(f"section over Λ{H.n}, morphism over Λ{m.n}")
    if H.grid != m.grid:
        raise GridError("section and morphism live on different grids")
    return _transport32(H, m.n, m.translation, m.eps, m.grid)


def pushforward32(m: Morphism32, H: GrassmannSection) -> GrassmannSection:
    inv = m.inverse()
    return pullback32(inv, H)


def relative_P32(H: GrassmannSection) -> GrassmannSection:
    return H.map(lambda z, F: apply_P32(F))


# -- supertorsion ------------------------------------------------------------

def check_supertorsion_flat() -> dict[str, Any]:
    """Supertorsion of the flat solution, evaluated in Λ₂[θ¹, θ²] with exact integer coefficients.

    Index layout: 0..2 vector (μ or α), 3..4 spinor (m or a).  The vielbein is
    E^α_μ = δ, E^α_b = −h^α_{bc}θ^c, E^a_m = δ, with inverse E^μ_b = h^μ_{bc}θ^c.
    T_{BC}^A = (−1)^{|M||C|} E^M_B E^N_C (∂_N E^A_M − (−1)^{|N||M|} ∂_M E^A_N).
    """
    G = GrassmannElement
    zero, one = G.zero(2), G.scalar(2, 1.0)
    theta = [G.generator(2, 1), G.generator(2, 2)]
    par = [0, 0, 0, 1, 1]
    h = H_SPINOR
    E = [[zero] * 5 for _ in range(5)]      # E[A][M]
    Einv = [[zero] * 5 for _ in range(5)]   # Einv[M][B]
    for i in range(5):
        E[i][i] = one
        Einv[i][i] = one
    for alpha in range(3):
        for b in range(2):
            s = sum((theta[c] * float(h[alpha, b, c]) for c in range(2)), zero)
            E[alpha][3 + b] = -s
            Einv[alpha][3 + b] = s

    def d(N: int, x: GrassmannElement) -> GrassmannElement:
        if N < 3:
            return zero  # no body-coordinate dependence
        bit = 1 << (N - 3)
        out = {}
        for m, c in x.coeffs.items():
            if m & bit:
                sign = -1 if bin(m & (bit - 1)).count("1") % 2 else 1
                out[m ^ bit] = sign * c
        return G(2, out)

    T = {}
    for A in range(5):
        for B in range(5):
            for Cc in range(5):
                acc = zero
                for M in range(5):
                    for N in range(5):
                        curl = d(N, E[A][M]) - d(M, E[A][N]) * ((-1) ** (par[N] * par[M]))
                        if curl.is_zero():
                            continue
                        acc = acc + Einv[M][B] * Einv[N][Cc] * curl * ((-1) ** (par[M] * par[Cc]))
                T[(B, Cc, A)] = acc
    report: dict[str, Any] = {"components": T}
    ok_bc_alpha = all(T[(3 + b, 3 + c, alpha)] == G.scalar(2, 2.0 * h[alpha, b, c])
                      for alpha in range(3) for b in range(2) for c in range(2))
    expect = {(3 + b, 3 + c, alpha) for alpha in range(3) for b in range(2) for c in range(2)}
    ok_rest = all(v.is_zero() for k, v in T.items() if k not in expect)
    report["T_bc^alpha = 2i gamma"] = ok_bc_alpha and np.array_equal(2 * h, 2j * GAMMA_SPINOR)
    report["T_betagamma^alpha = 0"] = all(T[(b, c, a)].is_zero() for a in range(3) for b in range(3) for c in range(3))
    report["T_bc^a = 0"] = all(T[(3 + b, 3 + c, 3 + a)].is_zero() for a in range(2) for b in range(2) for c in range(2))
    report["all other components vanish"] = ok_rest
    return report
