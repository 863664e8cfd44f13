"""Direct integration of i dpsi/ds = tau H(s) psi and derived sweep utilities.

The default scheme is an exponential midpoint rule: each substep applies the
exact propagator of H(s_mid) obtained by eigendecomposition of the small
reduced matrix, which preserves the norm to machine precision.  A high-order
explicit Runge-Kutta scheme (DOP853) is kept as an independent cross-check.
For tau sweeps the midpoint eigendecompositions are shared across all tau
values, so a whole sweep costs little more than a single evolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh, eigh_tridiagonal

from .models import ReducedHamiltonian, hamiltonian_at, tridiagonal_bands
from .spectrum import GapTrace, _two_lowest

METHODS = ("exponential-midpoint", "high-order-explicit")


class ConvergenceError(RuntimeError):
    """Step-halving did not converge within the substep budget."""


@dataclass(frozen=True)
class EvolutionConfig:
    step_tolerance: float = 1e-8
    max_steps: int = 1 << 22
    method: str = "exponential-midpoint"
    initial_steps: int = 256

    def __post_init__(self):
        if self.step_tolerance <= 0:
            raise ValueError("step_tolerance must be positive")
        if self.max_steps < 2:
            raise ValueError("max_steps must be at least 2")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class SweepResult:
    taus: np.ndarray
    probs: np.ndarray
    model_label: str
    config: EvolutionConfig

    def __post_init__(self):
        if np.any(np.diff(self.taus) <= 0):
            raise ValueError("taus must strictly increase")
        if np.any((self.probs < 0) | (self.probs > 1)):
            raise ValueError("probabilities must lie in [0, 1]")
        self.taus.setflags(write=False)
        self.probs.setflags(write=False)


@dataclass(frozen=True)
class TwoLevelAmplitudes:
    c0: complex
    c1: complex
    m: int

    @property
    def p_leak(self) -> float:
        return self.m * abs(self.c1) ** 2


def ground_state(model: ReducedHamiltonian, s: float) -> np.ndarray:
    """Normalized lowest eigenvector of H(s); sign fixed so the largest-
    magnitude entry is positive."""
    vals, vecs = _two_lowest(model, s)
    if vals[1] - vals[0] <= 1e-12 * max(abs(vals[1]), 1.0):
        raise RuntimeError(f"ground state degenerate at s={s}")
    v = vecs[:, 0]
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v


def _midpoint_eigs(model: ReducedHamiltonian, n_steps: int):
    """Eigendecompositions of H at the substep midpoints."""
    mids = (np.arange(n_steps) + 0.5) / n_steps
    decomps = []
    for s in mids:
        if model.tridiagonal:
            diag, off = tridiagonal_bands(model, s)
            w, v = eigh_tridiagonal(diag, off)
        else:
            w, v = eigh(hamiltonian_at(model, s))
        decomps.append((w, v))
    return decomps


def _propagate_small_dim(model: ReducedHamiltonian, taus: np.ndarray,
                         n_steps: int, psi0: np.ndarray) -> np.ndarray:
    """Midpoint propagation specialized for few-level models.

    All substep Hamiltonians are eigendecomposed in one batched call, and the
    substep propagators are multiplied pairwise (a balanced tree), so the
    Python-level work grows like log(n_steps) instead of n_steps.
    """
    mids = (np.arange(n_steps) + 0.5) / n_steps
    g = np.array([model.schedule(s) for s in mids])
    h = np.multiply.outer(1.0 - g, model.h0) + np.multiply.outer(g, model.h1)
    w, v = np.linalg.eigh(h)
    vt = v.transpose(0, 2, 1)
    ds = 1.0 / n_steps
    dim = model.dim
    psi = np.tile(psi0.astype(complex), (len(taus), 1))[..., None]
    # cap the (ntau, chunk, dim, dim) workspace at a few hundred MB
    chunk = max(2, (1 << 21) // max(1, len(taus) * dim * dim))
    for i0 in range(0, n_steps, chunk):
        wc, vc, vtc = w[i0:i0 + chunk], v[i0:i0 + chunk], vt[i0:i0 + chunk]
        phases = np.exp(-1j * ds * wc[None] * taus[:, None, None])
        u = (vc[None] * phases[..., None, :]) @ vtc[None]
        # fold pairs right-to-left so earlier substeps act first
        while u.shape[1] > 1:
            even = (u.shape[1] // 2) * 2
            prod = u[:, 1:even:2] @ u[:, 0:even:2]
            if u.shape[1] % 2:
                prod = np.concatenate([prod, u[:, -1:]], axis=1)
            u = prod
        psi = u[:, 0] @ psi
    return psi[..., 0].T


def _propagate_midpoint(model: ReducedHamiltonian, taus: np.ndarray,
                        n_steps: int, psi0: np.ndarray,
                        decomps=None) -> np.ndarray:
    """Evolve one initial state for every tau at once; returns dim x ntau."""
    if decomps is None and model.dim <= 8:
        return _propagate_small_dim(model, taus, n_steps, psi0)
    if decomps is None:
        decomps = _midpoint_eigs(model, n_steps)
    ds = 1.0 / n_steps
    psi = np.tile(psi0.astype(complex)[:, None], (1, len(taus)))
    for w, v in decomps:
        phases = np.exp(-1j * np.outer(w, taus) * ds)
        psi = v @ (phases * (v.T @ psi))
    return psi


def _evolve_batch_midpoint(model, taus, cfg):
    psi0 = ground_state(model, 0.0)
    n = cfg.initial_steps
    prev = _propagate_midpoint(model, taus, n, psi0)
    worst = np.inf
    while 2 * n <= cfg.max_steps:
        n *= 2
        cur = _propagate_midpoint(model, taus, n, psi0)
        worst = np.linalg.norm(cur - prev, axis=0).max()
        if worst < cfg.step_tolerance:
            return cur
        prev = cur
    raise ConvergenceError(
        f"midpoint integration not converged at {n} substeps "
        f"(error {worst:.3e}, tolerance {cfg.step_tolerance:.1e})")


def _evolve_dop853(model, tau, cfg):
    psi0 = ground_state(model, 0.0).astype(complex)

    def rhs(s, y):
        return -1j * tau * (hamiltonian_at(model, s) @ y)

    rtol = min(cfg.step_tolerance, 1e-8)
    sol = solve_ivp(rhs, (0.0, 1.0), psi0, method="DOP853",
                    rtol=rtol, atol=rtol * 1e-2)
    if not sol.success:
        raise ConvergenceError(f"DOP853 failed: {sol.message}")
    psi = sol.y[:, -1]
    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > 1e3 * rtol:
        raise ConvergenceError(f"norm drift {drift:.2e} exceeds budget")
    return psi / np.linalg.norm(psi)


def evolve_schrodinger(model: ReducedHamiltonian, tau: float,
                       cfg: EvolutionConfig = EvolutionConfig()) -> np.ndarray:
    """Final state at s=1 starting from the s=0 ground state.

    Accepted only when doubling the substep count moves the final state by
    less than cfg.step_tolerance in norm (midpoint method), or when the
    adaptive solver meets the equivalent local tolerance (explicit method).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if cfg.method == "exponential-midpoint":
        psi = _evolve_batch_midpoint(model, np.array([tau]), cfg)[:, 0]
    else:
        psi = _evolve_dop853(model, tau, cfg)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ConvergenceError("final state norm deviates by more than 1e-10")
    return psi


def transition_probability(psi: np.ndarray, model: ReducedHamiltonian) -> float:
    """P = 1 - |<phi0(1)|psi>|^2, clipped to [0, 1] against roundoff."""
    phi0 = ground_state(model, 1.0)
    p = 1.0 - abs(phi0 @ psi) ** 2
    return float(min(max(p, 0.0), 1.0))


def tau_sweep(model: ReducedHamiltonian, taus: np.ndarray,
              cfg: EvolutionConfig = EvolutionConfig()) -> SweepResult:
    """Leakage probability P(tau) for every tau, order-aligned with taus."""
    taus = np.asarray(taus, float)
    if np.any(taus <= 0):
        raise ValueError("all taus must be positive")
    if np.any(np.diff(taus) <= 0):
        raise ValueError("taus must strictly increase")
    if cfg.method == "exponential-midpoint":
        finals = _evolve_batch_midpoint(model, taus, cfg)
        probs = np.array([transition_probability(finals[:, j], model)
                          for j in range(len(taus))])
    else:
        probs = np.empty(len(taus))
        for j, tau in enumerate(taus):
            try:
                probs[j] = transition_probability(_evolve_dop853(model, tau, cfg), model)
            except ConvergenceError as exc:
                raise ConvergenceError(f"tau index {j} (tau={tau}): {exc}") from exc
    return SweepResult(taus=taus.copy(), probs=probs,
                       model_label=model.label, config=cfg)


def evolve_two_level(trace: GapTrace, tau: float, m: int = 1,
                     rtol: float = 1e-10) -> TwoLevelAmplitudes:
    """Integrate the eigenbasis amplitude equations along the trace:

        dC0/ds = -m C1 gamma/Delta
        dC1/ds =  C0 gamma/Delta - i tau Delta C1

    starting from C0=1, C1=0 (ground-state energy shifted to zero, so only
    the gap enters the phase).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    coup = trace.coupling_spline()
    dspl = trace.delta_spline()

    def rhs(s, y):
        c0, c1 = y
        k = coup(s)
        return [-m * c1 * k, c0 * k - 1j * tau * dspl(s) * c1]

    sol = solve_ivp(rhs, (0.0, 1.0), np.array([1.0 + 0j, 0.0 + 0j]),
                    method="DOP853", rtol=rtol, atol=rtol * 1e-2)
    if not sol.success:
        raise ConvergenceError(f"two-level integration failed: {sol.message}")
    c0, c1 = sol.y[:, -1]
    if abs(c0) ** 2 + m * abs(c1) ** 2 > 1.0 + 1e-6:
        raise ConvergenceError("two-level amplitudes exceed unit probability")
    return TwoLevelAmplitudes(c0=complex(c0), c1=complex(c1), m=m)
