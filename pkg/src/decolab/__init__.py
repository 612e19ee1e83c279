"""Numerical laboratory for spin-bath decoherence, real-clock damping,
global-observable distinguishability, and undecidability-of-collapse margins.
"""

from .core import (Bath, BathSpin, CapacityError, DegenerateBranchError,
                   DensityMatrix, LogComplex, ParameterError,
                   PhysicalConstants, PhysicalScenario, QubitAmplitudes,
                   RegimeError, log_product, partial_trace, sample_bath,
                   trace_distance, wrap_phase)
from .zurek import (ZurekState, RevivalReport, interference_floor,
                    reduced_density, revival_scan, revival_time_log,
                    suppression_particle_count, z_factor)
from .cavity import (BranchVectors, PassCoefficients, PassParams,
                     branch_vectors, inner_aa, inner_ab, inner_ab_approx,
                     inner_bb, integrated_coupling, pass_hamiltonian,
                     reduced_density_needle, single_pass_closed,
                     single_pass_numeric, offdiagonal_log_magnitude,
                     weak_coupling_ratio)
from .realclock import (ClockChannel, RevivalVerdict, damp_density,
                        damped_log_factor, damped_z, revival_kill_threshold,
                        revival_killed)
from .despagnat import (KExponent, collapse_distinguishable, k_exponent,
                        m_expect_collapsed, m_expect_damped,
                        m_expect_damped_term, m_expect_unitary)
from .feasibility import (Check, FeasibilityReport, SpeciesPreset,
                          appendix1_analysis, decoherence_bound, full_report,
                          load_presets, mass_moment_check,
                          mass_moment_threshold, min_dispersion, packet_width,
                          required_moment, tau_upper_bound,
                          transverse_velocity)
from .undecidability import (EventRecord, Projector, UndecidabilityResult,
                             branch_project, is_compatible,
                             projection_mixture, undecidability_margin)
from .oracle import (MAX_ENV_SPINS, DenseState, dense_evolve_cavity,
                     dense_evolve_zurek, dense_from_product, dense_m_expect,
                     pass_propagator)

__version__ = "0.1.0"
