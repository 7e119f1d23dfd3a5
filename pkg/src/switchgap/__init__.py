"""Switching rates and dissipative gaps of bistable driven-dissipative bosonic modes.

The package predicts the switching rate (dissipative gap, cat-qubit bit-flip
rate) of a single driven-dissipative bosonic mode from a closed-form
phase-space potential, and verifies the prediction against exact
diagonalization of the truncated generator and against direct integration of
the saddle-point equations of motion.
"""

from .model import (SystemParams, DerivedCoeffs, derive_coeffs, preset,
                    kerr_oscillator, dissipative_cat, dephased_cat,
                    load_config, params_to_dict, params_from_dict)
from .meanfield import (FixedPoint, FixedPointSet, fixed_points_general,
                        fixed_points_kerr, fixed_points_cat_asymptotic,
                        classify_stability, bistability_region)
from .keldysh import (PhaseSpaceState, DriftDiffusion, PotentialCoeffs,
                      RateEstimate, drift_diffusion, lindbladian_density,
                      tr_parametrization, check_curl_condition,
                      potential_coeffs, potential_phi, potential_gradient_g,
                      action, switching_rates, complexp_potential,
                      CUT_NEG_IMAG, CUT_NEG_REAL, ANSATZ_ZPRIME, FOKKER_PLANCK_Z)
from .lindblad import (Superoperator, SpectralSummary, build_lindbladian,
                       dissipative_gap, steady_state_moments, truncation_scan,
                       well_populations, auto_n_fock)
from .instanton import (Trajectory, SaddleJacobian, ShootResult, eom_rhs,
                        integrate, saddle_jacobian, shoot_instanton,
                        noise_free_relaxation, curve_deviation)

__version__ = "0.1.0"
