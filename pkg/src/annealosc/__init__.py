"""Near-adiabatic annealing simulations and leakage-oscillation analysis."""

__version__ = "0.1.0"

from .models import (ModelSpec, ReducedHamiltonian, build_barrier_model,
                     build_cubic_model, build_grover_model,
                     build_nobarrier_model, build_model, dH_ds, hamiltonian_at)
from .spectrum import (CrossingParams, GapTrace, SpectralPoint,
                       adiabatic_time_estimate, eigensystem_lowest, gap_trace,
                       locate_crossing, nobarrier_gap, rho_endpoints)
from .evolve import (EvolutionConfig, SweepResult, TwoLevelAmplitudes,
                     evolve_schrodinger, evolve_two_level, ground_state,
                     tau_sweep, transition_probability)
from .predict import (LargeGapParams, SplitParams, amplitude_integral,
                      grover_gamma, grover_omega, landau_zener_amplitude,
                      predict_grover, predict_large_gap, predict_split)
from .fit import FitResult, fit_A, fit_A_v
