"""Reduced flutter model of a feathered wing and speed-gradient feather control."""

from .config import ExperimentConfig, load_config
from .control import (ControlGains, build_gains, control_ma, control_nonma,
                      control_sg, evaluate_control, feedback_matrix,
                      goal_gradient, sg_gains)
from .dynamics import (ReducedModel, SimState, Trajectory, build_model,
                       disagreement, disagreement_rate, energy, energy_rate,
                       functional_L, functional_L_tilde, functional_rate,
                       functional_value, rk4_step, simulate, state_derivative)
from .errors import (BracketError, ConfigError, DivergenceError, DomainError,
                     FeatherwingError, ModelError, NumericError,
                     ParameterError)
from .experiment import (compare_laws, model_at_speed, run_experiment,
                         time_to_half)
from .feathers import (FeatherInfluence, FeatherSpec, feather_coeffs,
                       influence_coeffs, psi_from_x, shape_factors, x_from_psi)
from .model import (ModalCoefficients, ModeShapes, WingModel, cantilever_modes,
                    elliptical_torsion_inertia, eval_bending_mode,
                    eval_torsion_mode, integrate, modal_coefficients)
from .network import Adjacency, build_topology, chi_lambda, consensus_term
from .stability import (FlutterSearchResult, SystemMatrix, abscissa_sweep,
                        assemble, bracket_from_sweep, find_flutter_speed,
                        fit_growth_rate, mode_frequencies, spectral_abscissa)

__version__ = "0.1.0"
