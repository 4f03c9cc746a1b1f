"""Non-Markovian finite-temperature two-time correlation functions.

Library for the time-local second-order evolution of open-quantum-system
correlators ``<A(t1) B(t2)>``, with Markovian-regression and
non-Markovian-regression reference modes and an exact discretized-bath
reference for validation.  Units: ``hbar = k_B = 1``.
"""

from .bath import (BathCorrelationTable, DiscretizedBath, QuadratureError,
                   SpectralDensity, alpha, alpha_eff, beta, discretize,
                   discrete_alpha, discrete_beta, nbar, tabulate,
                   tabulate_discrete, truncated_occupations)
from .coefficients import (FrozenGammaSet, GammaSet, PlateauNotReachedError,
                           markovian_limits)
from .evolution import (SpinBosonSingleTime, Trajectory, check_density_matrix,
                        expectations_from_rho, propagate_density,
                        single_time_expectation, spin_boson_single_time)
from .operators import (SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, SIGMA_Y, SIGMA_Z,
                        EigenoperatorDecomposition, SystemModel, commutator,
                        eigenoperator_decompose, interaction_picture,
                        tensor_embed, two_level)
from .oracle import (SectorOracle, build_total_hamiltonian, dephasing_two_time,
                     exact_two_time, thermal_bath_state)
from .spectra import SpectrumResult, default_omega_grid, fourier_spectrum, peak_metrics
from .twotime import (MODES, CorrelationSet, SpinBosonCorrelators,
                      SPIN_BOSON_PAIRS, evolve_general, evolve_spin_boson,
                      initial_conditions, qrt_condition_report)

__version__ = "0.1.0"
