"""Lorentzian Hausdorff measures and coarea checks on finite causal sets."""

from .backends import (Box, CausalSet, MinkowskiDiamond, MinkowskiSpace, SprinkleConfig, dump_space,
                       load_space, longest_path_tau, minkowski_tau, parse_space, save_space, sprinkle,
                       unit_diamond)
from .covering import (ChronologicalEstimate, Enlargement, VitaliCertificate, chronological_estimation,
                       enlarge_minkowski, verify_certificate, vitali_select)
from .curves import (CausalCurve, CausalMap, check_causality_preserving, controlling_modulus, tau_length,
                     tlip_estimate, v1_of_curve)
from .errors import (AxiomViolation, ExperimentAborted, InfeasibleError, InputError, InvariantError,
                     LCoareaError, SizeError, UnsupportedError)
from .harness import (CoareaReport, ExperimentConfig, density_diagnostic, random_coarea_instance,
                      run_batch, run_coarea_experiment, run_minkowski_volume_experiment,
                      strong_vs_causal_test)
from .integration import (FiniteMeasure, check_coarea_chain, phi_delta, upper_integral_finite,
                          weighted_causal_integral_delta)
from .measure import (CoverSolution, MeasureEstimate, candidate_diamonds, cover_value_exact,
                      cover_value_greedy, estimate_measure, minkowski_null_tiling, omega, rho,
                      strong_measure_value)
from .space import ALL, AxiomReport, CausalDiamond, PreLengthSpace, verify_axioms

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
