"""Position error bounds and RIS profile design for satellite downlink localization."""

__version__ = "0.1.0"

from .geometry import (AnglePair, Pose, Satellite, Scenario, SPEED_OF_LIGHT,
                       direction_angles, doppler_shift, path_delay, rotation_from_euler)
from .arrays import (UpaGeometry, array_response, array_response_jacobian,
                     direction_vector, ris_cascade_vector, upa_coordinates)
from .channel import (PathParams, RisPath, SignalConfig, fspl_gain, noiseless_signal,
                      random_pilots, random_precoders, scenario_to_path_params)
from .fim import (FimBundle, FimFactors, assemble_multi, channel_fim, evaluate_scenario,
                  location_fim_and_peb, location_jacobian, mu_partials, naive_fim_oracle,
                  peb_from_workspaces, scenario_workspaces)
from .beamforming import (DependenceReport, GridSpec, RisProfile, SteeringBasis,
                          directional_profile, optimize_profile, profile_dependence_check,
                          random_profile, steering_basis)
from .config import (ExperimentConfig, build_scenario, build_signal_config,
                     config_from_dict, load_config)
from .cli import emit_csv, profiles_for_scheme, run_evaluate, run_sweep
