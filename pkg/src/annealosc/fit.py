"""Least-squares estimation of the splitting-ansatz parameters A (and v).

The objective is smooth, cheap, and one- or two-dimensional, so the fits use
a coarse scan to bracket the best basin followed by golden-section
refinement; the two-parameter fit profiles A out of the objective and scans
a log-spaced v grid to avoid the exponentially flat valley in v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evolve import SweepResult
from .predict import SplitParams, predict_split

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_min(f, a: float, b: float, tol: float = 1e-8) -> float:
    """Golden-section search for the minimum of a unimodal f on [a, b]."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _scan_then_golden(f, a, b, n_scan=41, tol=1e-8):
    xs = np.linspace(a, b, n_scan)
    ys = np.array([f(x) for x in xs])
    i = int(np.argmin(ys))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, n_scan - 1)]
    return golden_min(f, lo, hi, tol), i in (0, n_scan - 1)


@dataclass(frozen=True)
class FitResult:
    a_hat: float
    v_hat: float | None
    rms_residual: float
    n_points: int
    converged: bool

    def __post_init__(self):
        if self.rms_residual < 0:
            raise ValueError("rms_residual must be nonnegative")

    def provenance(self, params: SplitParams, sweep: SweepResult) -> dict:
        """Full parameter record for JSON serialization."""
        return {
            "a_hat": self.a_hat,
            "v_hat": self.v_hat,
            "rms_residual": self.rms_residual,
            "n_points": self.n_points,
            "converged": self.converged,
            "g": params.g,
            "v": self.v_hat if self.v_hat is not None else params.v,
            "omega_minus": params.omega_minus,
            "omega_plus": params.omega_plus,
            "rho0": params.rho0,
            "rho1": params.rho1,
            "m": params.m,
            "tau_min": float(sweep.taus[0]),
            "tau_max": float(sweep.taus[-1]),
        }


def _check_sweep(sweep: SweepResult, p: SplitParams) -> None:
    if len(sweep.taus) < 20:
        raise ValueError("need at least 20 sweep points")
    span = sweep.taus[-1] - sweep.taus[0]
    omega = p.omega_minus + p.omega_plus
    if span * omega < 3 * 2 * math.pi:
        raise ValueError("sweep must span at least 3 oscillation periods")


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x**2)))


def fit_A(sweep: SweepResult, p: SplitParams, a_max: float = 2.0,
          tol: float = 1e-8) -> FitResult:
    """One-parameter fit of A over [0, a_max] against a direct sweep."""
    _check_sweep(sweep, p)
    taus, probs = sweep.taus, sweep.probs

    def sse(a):
        return float(np.sum((probs - predict_split(p.with_values(A=a), taus)) ** 2))

    a_hat, on_edge = _scan_then_golden(sse, 0.0, a_max, tol=tol)
    resid = probs - predict_split(p.with_values(A=a_hat), taus)
    return FitResult(a_hat=float(a_hat), v_hat=None, rms_residual=_rms(resid),
                     n_points=len(taus), converged=not on_edge)


def fit_A_v(sweep: SweepResult, p: SplitParams, a_max: float = 2.0,
            v_range: tuple[float, float] = (0.02, 50.0), n_scan: int = 48,
            tol: float = 1e-9) -> FitResult:
    """Joint (A, v) fit with g fixed.

    The objective valley is strongly correlated in (A, v), so the fit
    profiles out A: for each candidate v the inner 1-d minimum over A is
    found exactly, and the resulting profile objective F(v) = min_A sse(A, v)
    is scanned on a log-spaced v grid and refined by golden section.
    """
    _check_sweep(sweep, p)
    taus, probs = sweep.taus, sweep.probs
    log_lo, log_hi = math.log(v_range[0]), math.log(v_range[1])

    def sse(a, v):
        q = p.with_values(A=a, v=v)
        return float(np.sum((probs - predict_split(q, taus)) ** 2))

    def profile(logv):
        v = math.exp(logv)
        a, _edge = _scan_then_golden(lambda x: sse(x, v), 0.0, a_max, tol=tol)
        return sse(a, v)

    grid = np.linspace(log_lo, log_hi, n_scan)
    vals = np.array([profile(lv) for lv in grid])
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, n_scan - 1)]
    logv = golden_min(profile, lo, hi, tol=tol)
    v_hat = math.exp(logv)
    a_hat, _edge = _scan_then_golden(lambda x: sse(x, v_hat), 0.0, a_max,
                                     tol=tol)
    resid = probs - predict_split(p.with_values(A=a_hat, v=v_hat), taus)
    # degenerate when forcing A = 0 fits essentially as well (the data carry
    # no Landau-Zener signal, so v is arbitrary), or v ran into its bounds
    best = float(np.sum(resid**2))
    degenerate = (best >= sse(0.0, v_hat) * (1.0 - 1e-9) - 1e-30
                  or not (v_range[0] * 1.001 < v_hat < v_range[1] * 0.999))
    return FitResult(a_hat=float(a_hat), v_hat=float(v_hat),
                     rms_residual=_rms(resid), n_points=len(taus),
                     converged=not degenerate)


def fit_single_frequency(sweep: SweepResult, p: SplitParams) -> float:
    """RMS residual of the best single-frequency model: the large-gap form
    with omega = omega_- + omega_+ and a free overall amplitude (linear
    least squares).  Used as the nested-model baseline."""
    taus, probs = sweep.taus, sweep.probs
    omega = p.omega_minus + p.omega_plus
    basis = (p.rho0**2 + p.rho1**2 - 2 * p.rho0 * p.rho1 * np.cos(omega * taus)) / taus**2
    c = float(basis @ probs / (basis @ basis))
    return _rms(probs - c * basis)
