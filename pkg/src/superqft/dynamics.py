"""Model-independent field-theory layer: τ, causal disjointness and time-slice representatives."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from . import model11 as m11
from . import model32 as m32
from . import numerics as nm
from .errors import GridError, PreconditionError

Box = Optional[tuple]


@dataclass(frozen=True)
class FieldTheoryHandle:
    """Everything the quantization and law checks need to know about a model.

    ``dim_s`` is the number of odd coordinates; the parity of P equals
    dim_s mod 2, and β is i for even dim_s and 1 for odd dim_s.
    """

    model: str
    dim_s: int
    grid: Any
    apply_P: Callable
    green: Callable
    pair: Callable
    susy_Q: Optional[Callable] = None
    flat: bool = True
    extras: dict = field(default_factory=dict)

    @property
    def parity_P(self) -> int:
        return self.dim_s % 2

    @property
    def beta(self) -> complex:
        return 1j if self.dim_s % 2 == 0 else 1.0

    @property
    def swap_sign(self) -> int:
        """s in v1 v2 + s (−1)^{|v1||v2|} v2 v1 = β τ(v1, v2)."""
        return (-1) ** (self.dim_s + 1)

    def zero(self):
        return self.extras["zero"]()


def theory11(grid: m11.Grid11 | None = None) -> FieldTheoryHandle:
    grid = grid or m11.Grid11(0.0, 2.0, 4097)
    return FieldTheoryHandle("1|1", 1, grid, m11.apply_P11, m11.green11, m11.pair11, m11.susy_Q,
                             extras={"zero": lambda: m11.Section11.zeros(grid)})


def theory32(grid: m32.Grid32 | None = None, *, flat: bool = True) -> FieldTheoryHandle:
    grid = grid or m32.Grid32(128, 64, 64)
    return FieldTheoryHandle("3|2", 2, grid, m32.apply_P32, m32.green32, m32.pair32,
                             flat=flat, extras={"zero": lambda: m32.Section32.zeros(grid)})


def causal_propagator(th: FieldTheoryHandle, F):
    """G = G⁺ − G⁻."""
    return th.green(F, "retarded") - th.green(F, "advanced")


def tau(th: FieldTheoryHandle, F1, F2) -> float:
    """τ(F1, F2) = ⟨G F1, F2⟩."""
    if F1.is_zero() or F2.is_zero():
        return 0.0
    return th.pair(causal_propagator(th, F1), F2)


def support_box(th: FieldTheoryHandle, F, rtol: float = 1e-13) -> Box:
    """Index window (1|1) or space-time index box (3|2) holding F; None if F = 0."""
    if th.model == "1|1":
        return F.support(rtol)
    mag = F.magnitude()
    top = mag.max()
    if top == 0:
        return None
    idx = np.nonzero(mag > rtol * top)
    return tuple((int(i.min()), int(i.max())) for i in idx)


def _box_mask(shape, box) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    mask[tuple(slice(lo, hi + 1) for lo, hi in box)] = True
    return mask


def causally_disjoint(th: FieldTheoryHandle, supp1: Box, supp2: Box) -> bool:
    """True iff the causal future and past of supp1 miss supp2.

    In 1|1 the causal future and past of any point cover the whole interval,
    so only an empty support is disjoint.  In 3|2 the numerical cone of the
    leapfrog stencil stands in for the light cone; it contains it at the
    fixed CFL number, so the answer is conservative.
    """
    if supp1 is None or supp2 is None:
        return True
    if th.model == "1|1":
        return False
    shape = th.grid.shape
    m1 = _box_mask(shape, supp1)
    m2 = _box_mask(shape, supp2)
    cone = m32.cone_mask(m1, "retarded") | m32.cone_mask(m1, "advanced")
    return not np.any(cone & m2)


def _time_axis(th: FieldTheoryHandle) -> tuple[np.ndarray, float]:
    if th.model == "1|1":
        return th.grid.t, th.grid.h
    g = th.grid
    return g.t0 + g.dt * np.arange(g.Nt), g.dt


def _scale_time(F, rho: np.ndarray):
    if isinstance(F, m11.Section11):
        return m11.Section11(F.grid, F.f * rho, F.h * rho)
    r = rho[:, None, None]
    return m32.Section32(F.grid, F.phi * r, F.psi * r[None], F.eta * r)


def _time_window(th: FieldTheoryHandle, F) -> tuple[int, int] | None:
    return F.support() if th.model == "1|1" else F.time_support()


def timeslice_representative(th: FieldTheoryHandle, F, slab: tuple[float, float], *,
                             min_cells: int = 16):
    """A section supported in the time slab, equal to F modulo P(compact sections).

    F′ = F − P(ρ⁻ G⁺F + ρ⁺ G⁻F), where ρ⁺ rises smoothly from 0 to 1 across
    the middle half of the slab and ρ⁻ = 1 − ρ⁺.  A section already inside
    the slab is returned unchanged.
    """
    t, dt = _time_axis(th)
    ta, tb = slab
    if not (t[0] < ta < tb < t[-1]):
        raise PreconditionError("slab must lie strictly inside the time range")
    if (tb - ta) / dt < min_cells:
        raise GridError(f"slab narrower than {min_cells} cells")
    win = _time_window(th, F)
    if win is None or (t[win[0]] >= ta and t[win[1]] <= tb):
        return F
    lo = ta + 0.25 * (tb - ta)
    hi = tb - 0.25 * (tb - ta)
    rho_plus = nm.smoothstep((t - lo) / (hi - lo))
    rho_minus = 1.0 - rho_plus
    H = _scale_time(th.green(F, "retarded"), rho_minus) + _scale_time(th.green(F, "advanced"), rho_plus)
    return F - th.apply_P(H)


# -- checks -------------------------------------------------------------------

def rk4_green_dt2(h: np.ndarray, grid: m11.Grid11, side: str) -> tuple[np.ndarray, np.ndarray]:
    """Solve y'' = h by RK4 with step 2Δt, zero data at the start (retarded) or end (advanced).

    Returns (indices, values) on the even-offset sample points the
    integrator visits; the half steps use the odd samples of h.
    """
    src = h if side == "retarded" else h[::-1]
    step = 2 * grid.h
    idx = np.arange(0, grid.N, 2)
    y = np.zeros(len(idx))
    v = 0.0
    yk = 0.0
    for j in range(len(idx) - 1):
        k = idx[j]
        a0, a1, a2 = src[k], src[k + 1], src[k + 2]
        k1y, k1v = v, a0
        k2y, k2v = v + 0.5 * step * k1v, a1
        k3y, k3v = v + 0.5 * step * k2v, a1
        k4y, k4v = v + step * k3v, a2
        yk = yk + step / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        v = v + step / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        y[j + 1] = yk
    if side == "retarded":
        return idx, y
    # reversed time: y(t1 − s) solves the same equation, so map indices back
    return (grid.N - 1 - idx)[::-1], y[::-1]


def uniqueness_gap(h: np.ndarray, grid: m11.Grid11) -> float:
    """Max relative gap between the iterated-integral and RK4 constructions of G±_{∂t²}."""
    worst = 0.0
    for side in ("retarded", "advanced"):
        direct = m11.green_dt2(h, grid, side)
        idx, ode = rk4_green_dt2(h, grid, side)
        worst = max(worst, float(np.max(np.abs(direct[idx] - ode)) / np.max(np.abs(direct))))
    return worst


def weak_nondegeneracy_probe(th: FieldTheoryHandle, F, tests) -> dict:
    """Report max |τ(F, G_i)| over a test family next to ‖G F‖; informative only."""
    taus = [abs(tau(th, F, Gi)) for Gi in tests]
    return {"max_tau": float(max(taus, default=0.0)),
            "norm_GF": float(causal_propagator(th, F).max_abs()),
            "family_size": len(tests)}


def random_sections11(grid: m11.Grid11, rng: np.random.Generator, count: int, *,
                      parity: int | None = None, width: tuple[float, float] = (0.04, 0.08)):
    """Gaussian bumps at least 8.75 widths from either end, so compact at 1e-13."""
    t = grid.t
    span = grid.t1 - grid.t0
    out = []
    for _ in range(count):
        w = rng.uniform(*width)
        c = rng.uniform(grid.t0 + 0.35 * span, grid.t1 - 0.35 * span)
        bump = nm.gaussian(t, c, w) * rng.uniform(0.5, 1.5) * rng.choice([-1, 1])
        p = parity if parity is not None else int(rng.integers(0, 2))
        out.append(m11.Section11.odd(grid, bump) if p else m11.Section11.even(grid, bump))
    return out


def random_sections32(grid: m32.Grid32, rng: np.random.Generator, count: int, *,
                      parity: int | None = None, width: float = 0.5, time_width: float = 0.3,
                      region: tuple[tuple[float, float], ...] | None = None):
    """Gaussian space-time pulses centred in the middle of the time range."""
    T, X, Y = grid.coords()
    tmid = grid.t0 + grid.dt * (grid.Nt - 1) / 2
    region = region or ((tmid - 0.3, tmid + 0.3), (0.35 * grid.Lx, 0.65 * grid.Lx), (0.35 * grid.Ly, 0.65 * grid.Ly))
    out = []
    for _ in range(count):
        c = [rng.uniform(lo, hi) for lo, hi in region]
        pulse = lambda: (np.exp(-0.5 * ((T - c[0]) / time_width) ** 2
                                - ((X - c[1]) ** 2 + (Y - c[2]) ** 2) / (2 * width**2))
                         * rng.uniform(0.5, 1.5) * rng.choice([-1, 1]))
        p = parity if parity is not None else int(rng.integers(0, 2))
        if p:
            out.append(m32.Section32.make(grid, psi=np.stack([pulse(), pulse()])))
        else:
            out.append(m32.Section32.make(grid, phi=pulse(), eta=pulse()))
    return out
