"""Spectral-gap traces, avoided-crossing extraction, and gap integrals.

Conventions: Delta(s) = lambda1 - lambda0 > 0, gamma(s) = <phi0|dH/ds|phi1>
with a sign-continuous eigenvector gauge, and rho(s) = gamma(s)/Delta(s)**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, interpolate, optimize
from scipy.linalg import eigh, eigh_tridiagonal

from .models import ReducedHamiltonian, dH_ds, hamiltonian_at, tridiagonal_bands


class DegenerateGroundStateError(RuntimeError):
    """Raised when the two lowest levels coincide (Delta <= 0)."""


def eigensystem_lowest(h: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """k smallest eigenvalues (ascending) and orthonormal eigenvectors of a
    symmetric matrix, with a residual check ||Hv - lv|| <= 1e-10 ||H||."""
    h = np.asarray(h, float)
    dim = h.shape[0]
    if not 1 <= k <= dim:
        raise ValueError(f"need 1 <= k <= {dim}, got {k}")
    vals, vecs = eigh(h, subset_by_index=(0, k - 1))
    scale = max(np.linalg.norm(h, 2), 1.0)
    resid = np.linalg.norm(h @ vecs - vecs * vals, axis=0)
    if np.any(resid > 1e-10 * scale):
        raise RuntimeError(f"eigensolver residual too large: {resid.max():.3e}")
    return vals, vecs


def _two_lowest(model: ReducedHamiltonian, s: float) -> tuple[np.ndarray, np.ndarray]:
    if model.tridiagonal:
        diag, off = tridiagonal_bands(model, s)
        vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, 1))
        return vals, vecs
    return eigensystem_lowest(hamiltonian_at(model, s), 2)


def gap_at(model: ReducedHamiltonian, s: float) -> float:
    vals, _ = _two_lowest(model, s)
    return float(vals[1] - vals[0])


def gamma_at(model: ReducedHamiltonian, s: float, vecs: np.ndarray | None = None) -> float:
    """Transition matrix element <phi0|dH/ds|phi1> (sign set by the supplied
    or freshly computed eigenvectors)."""
    if vecs is None:
        _, vecs = _two_lowest(model, s)
    return float(vecs[:, 0] @ dH_ds(model, s) @ vecs[:, 1])


@dataclass(frozen=True)
class SpectralPoint:
    s: float
    lambda0: float
    lambda1: float
    delta: float
    gamma: float
    rho: float


@dataclass(frozen=True)
class GapTrace:
    """Spectral data sampled on an increasing s grid covering [0, 1].

    Eigenvector signs are fixed so successive overlaps are positive, which
    makes gamma(s) continuous on the grid.  The eigenvectors themselves are
    kept (dim x npoints per level) for cross checks and endpoint gauges.
    """

    s: np.ndarray
    lambda0: np.ndarray
    lambda1: np.ndarray
    delta: np.ndarray
    gamma: np.ndarray
    rho: np.ndarray
    vec0: np.ndarray = field(repr=False)
    vec1: np.ndarray = field(repr=False)
    model: ReducedHamiltonian = field(repr=False)
    gauge_continuous: bool = True

    def __post_init__(self):
        if self.s[0] != 0.0 or self.s[-1] != 1.0 or np.any(np.diff(self.s) <= 0):
            raise ValueError("s grid must strictly increase from 0 to 1")
        if np.any(self.delta <= 0):
            raise DegenerateGroundStateError("nonpositive gap in trace")
        for a in (self.s, self.lambda0, self.lambda1, self.delta, self.gamma,
                  self.rho, self.vec0, self.vec1):
            a.setflags(write=False)

    @property
    def points(self) -> list[SpectralPoint]:
        return [SpectralPoint(*row) for row in zip(
            self.s, self.lambda0, self.lambda1, self.delta, self.gamma, self.rho)]

    def delta_spline(self):
        return interpolate.CubicSpline(self.s, self.delta)

    def coupling_spline(self):
        """Cubic spline of gamma(s)/Delta(s)."""
        return interpolate.CubicSpline(self.s, self.gamma / self.delta)


def _crossing_refine_grid(s_grid: np.ndarray, delta: np.ndarray, n_extra: int) -> np.ndarray:
    """Extra sample points clustered around the interior gap minimum."""
    i = int(np.argmin(delta))
    if i == 0 or i == len(s_grid) - 1:
        return np.empty(0)
    g = delta[i]
    # refine over the region where Delta < 4g, padded by one coarse cell
    below = np.where(delta < 4 * g)[0]
    lo = s_grid[max(below.min() - 1, 0)]
    hi = s_grid[min(below.max() + 1, len(s_grid) - 1)]
    return np.linspace(lo, hi, n_extra + 2)[1:-1]


def gap_trace(model: ReducedHamiltonian, grid: np.ndarray | None = None,
              n_points: int = 201, refine: bool = True,
              n_refine: int = 160) -> GapTrace:
    """Sample the two lowest levels along s with a sign-continuous gauge.

    A uniform base grid is used unless `grid` is given; when `refine` is set
    and the gap has an interior minimum, extra points are inserted around it
    before the gauge-fixing pass.
    """
    if grid is None:
        if n_points < 64:
            raise ValueError("need at least 64 grid points")
        grid = np.linspace(0.0, 1.0, n_points)
    grid = np.asarray(grid, float)
    if grid[0] != 0.0 or grid[-1] != 1.0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must strictly increase from 0 to 1")

    if refine:
        coarse_delta = np.array([gap_at(model, s) for s in grid])
        if np.any(coarse_delta <= 0):
            raise DegenerateGroundStateError("nonpositive gap on coarse grid")
        extra = _crossing_refine_grid(grid, coarse_delta, n_refine)
        if extra.size:
            grid = np.unique(np.concatenate([grid, extra]))

    npts = len(grid)
    lam0 = np.empty(npts)
    lam1 = np.empty(npts)
    vec0 = np.empty((model.dim, npts))
    vec1 = np.empty((model.dim, npts))
    prev = None
    for i, s in enumerate(grid):
        vals, vecs = _two_lowest(model, s)
        if vals[1] - vals[0] <= 0:
            raise DegenerateGroundStateError(f"degenerate levels at s={s}")
        if prev is not None:
            for j in range(2):
                if prev[:, j] @ vecs[:, j] < 0:
                    vecs[:, j] = -vecs[:, j]
        prev = vecs
        lam0[i], lam1[i] = vals
        vec0[:, i] = vecs[:, 0]
        vec1[:, i] = vecs[:, 1]

    delta = lam1 - lam0
    gamma = np.empty(npts)
    for i, s in enumerate(grid):
        gamma[i] = vec0[:, i] @ dH_ds(model, s) @ vec1[:, i]
    rho = gamma / delta**2
    return GapTrace(s=grid, lambda0=lam0, lambda1=lam1, delta=delta,
                    gamma=gamma, rho=rho, vec0=vec0, vec1=vec1, model=model)


@dataclass(frozen=True)
class CrossingParams:
    """Avoided-crossing descriptors and gap integrals.

    kind is "avoided" when the gap dips below half its flank value (Delta
    reaches 2g on both sides of the minimum), "large-gap" when an interior
    minimum exists but stays shallow, and "none" when Delta is monotone.
    v is NaN unless kind == "avoided".
    """

    kind: str
    s_star: float
    g: float
    v: float
    omega_minus: float
    omega_plus: float

    @property
    def omega(self) -> float:
        return self.omega_minus + self.omega_plus

    @property
    def has_crossing(self) -> bool:
        return self.kind == "avoided"


def _flank_slope(model: ReducedHamiltonian, lo: float, hi: float, n: int = 40) -> float:
    ss = np.linspace(lo, hi, n)
    dd = np.array([gap_at(model, s) for s in ss])
    return float(np.polyfit(ss, dd, 1)[0])


def locate_crossing(trace: GapTrace, s_tol: float = 1e-8,
                    quad_tol: float = 1e-10) -> CrossingParams:
    """Refine the gap minimum, classify it, and integrate the gap.

    The minimum is refined by bounded scalar minimization of Delta(s) between
    the bracketing grid points.  The Landau-Zener slope v is read off the
    curvature of Delta**2 at the minimum, v = sqrt((Delta**2)''(s*) / 2),
    which is exact for the Landau-Zener gap sqrt(g**2 + v**2 (s - s*)**2) and
    insensitive to where the crossing region ends.  (The straight flanks of
    the gap curve never reach the asymptotic slope when the crossing region
    is narrow, so a flank-line fit systematically underestimates v; see
    flank_slopes for that diagnostic.)  omega_-/omega_+ come from adaptive
    quadrature of Delta split at s*.
    """
    model = trace.model
    i = int(np.argmin(trace.delta))
    monotone = i == 0 or i == len(trace.s) - 1
    if monotone:
        omega, _ = integrate.quad(lambda s: gap_at(model, s), 0.0, 1.0,
                                  epsabs=quad_tol, limit=200)
        return CrossingParams(kind="none", s_star=math.nan, g=float(trace.delta.min()),
                              v=math.nan, omega_minus=omega, omega_plus=0.0)

    lo, hi = trace.s[i - 1], trace.s[i + 1]
    res = optimize.minimize_scalar(lambda s: gap_at(model, s), bounds=(lo, hi),
                                   method="bounded", options={"xatol": s_tol})
    s_star = float(res.x)
    g = float(gap_at(model, s_star))

    omega_minus, _ = integrate.quad(lambda s: gap_at(model, s), 0.0, s_star,
                                    epsabs=quad_tol, limit=200)
    omega_plus, _ = integrate.quad(lambda s: gap_at(model, s), s_star, 1.0,
                                   epsabs=quad_tol, limit=200)

    # half width at Delta = 2g; absent on either side -> shallow (large-gap) dip
    def rises_to(target, a, b):
        fa = gap_at(model, a) - target
        fb = gap_at(model, b) - target
        if fa * fb > 0:
            return None
        return float(optimize.brentq(lambda s: gap_at(model, s) - target, a, b,
                                     xtol=1e-10))
    left = rises_to(2 * g, 0.0, s_star) if gap_at(model, 0.0) > 2 * g else None
    right = rises_to(2 * g, s_star, 1.0) if gap_at(model, 1.0) > 2 * g else None
    if left is None or right is None:
        return CrossingParams(kind="large-gap", s_star=s_star, g=g, v=math.nan,
                              omega_minus=omega_minus, omega_plus=omega_plus)

    w = max(s_star - left, right - s_star)
    # curvature of Delta**2 at the minimum: exact second difference for the
    # Landau-Zener parabola, sampled well inside the crossing region
    h = min(w / 4.0, s_star, 1.0 - s_star)
    curv = (gap_at(model, s_star + h) ** 2 - 2.0 * g**2
            + gap_at(model, s_star - h) ** 2) / h**2
    v = math.sqrt(max(curv / 2.0, 0.0))
    return CrossingParams(kind="avoided", s_star=s_star, g=g, v=v,
                          omega_minus=omega_minus, omega_plus=omega_plus)


def flank_slopes(trace: GapTrace, crossing: CrossingParams) -> tuple[float, float]:
    """Separate left/right flank slopes of an avoided crossing (for asymmetry
    diagnostics)."""
    if not crossing.has_crossing:
        raise ValueError("no avoided crossing")
    model = trace.model
    s_star, g = crossing.s_star, crossing.g
    left = optimize.brentq(lambda s: gap_at(model, s) - 2 * g, 0.0, s_star, xtol=1e-10)
    right = optimize.brentq(lambda s: gap_at(model, s) - 2 * g, s_star, 1.0, xtol=1e-10)
    w = max(s_star - left, right - s_star)
    wlo = max(s_star - 6 * w, 0.0)
    whi = min(s_star + 6 * w, 1.0)
    sl = _flank_slope(model, wlo, max(s_star - 2 * w, wlo + 1e-6))
    sr = _flank_slope(model, min(s_star + 2 * w, whi - 1e-6), whi)
    return sl, sr


def nobarrier_gap(s, mu: float):
    """Closed-form no-barrier gap sqrt(1 - 2s + (1 + mu) s**2)."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    s = np.asarray(s, float)
    if np.any(s < 0) or np.any(s > 1):
        raise ValueError("s must lie in [0, 1]")
    out = np.sqrt(1.0 - 2.0 * s + (1.0 + mu) * s**2)
    return float(out) if out.ndim == 0 else out


def rho_endpoints(trace: GapTrace) -> tuple[float, float]:
    """Signed rho(0), rho(1) under the trace's continuous gauge."""
    return float(trace.rho[0]), float(trace.rho[-1])


def adiabatic_time_estimate(trace: GapTrace) -> float:
    """Folklore adiabatic time: integral of |gamma(s)| / Delta(s)**2."""
    spl = interpolate.CubicSpline(trace.s, np.abs(trace.gamma) / trace.delta**2)
    return float(spl.integrate(0.0, 1.0))
