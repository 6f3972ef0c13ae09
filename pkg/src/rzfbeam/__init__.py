"""Relaxed zero-forcing beamforming under temporally correlated interference.

The package provides:

* ``scenarios`` - array/channel models, correlated-source synthesis, SNR/SIR
  calibration, and leadfield loading;
* ``covariance`` - analytic and sample snapshot covariances;
* ``beamformers`` - MVDR, zero-forcing, the leakage-budget (relaxed
  zero-forcing) family, the distortionless MMSE solution, and the
  estimated-statistics MMSE beamformer;
* ``theory`` - closed-form MSE analysis for a single correlated interferer;
* ``adaptive`` - per-snapshot online implementations (dual-domain adaptive
  algorithm and constrained normalized LMS) with compiled kernels;
* ``experiments`` / ``cli`` - sweep drivers, CSV emission, and the
  ``rzfbeam`` command-line tool.
"""

__version__ = "0.1.0"

from .adaptive import (CnlmsState, DdaaState, OnlineRunResult, cnlms_step,
                       ddaa_step, run_online)
from .beamformers import (Beamformer, RzfSolveReport, a_mmse, epsilon_mvdr,
                          leakage, mmse_dr, mvdr, rzf_from_epsilon,
                          rzf_from_lambda, zf)
from .covariance import (CovarianceEstimate, InterferenceGram,
                         analytic_covariance, interference_gram,
                         sample_covariance)
from .experiments import (EmpiricalEvaluation, EpsilonSearchEntry,
                          ExperimentSpec, SweepResult, SweepRow,
                          default_epsilon_grid, emit_csv, empirical_mse,
                          epsilon_grid_search, leakage_decomposition,
                          read_sweep_csv, run_sweep)
from .scenarios import (LeadfieldMatrix, Scenario, SignalBlock, SourceModel,
                        build_from_channels, build_toy, calibrate_powers,
                        correlated_interference_cov, generate_block,
                        leak_power_for_correlation, load_leadfield,
                        nominal_snr_sir, toy_doa_grid, ula_steering)
from .theory import (AchievedMse, RegimeReport, SingleInterferenceGeometry,
                     achieved_mse, geometry_from_scenario, mse_closed_form,
                     mse_of_lambda, per_source_gamma, reduce_to_2d, regime,
                     superiority_witness, two_channel_scenario)

__all__ = [
    "AchievedMse", "Beamformer", "CnlmsState", "CovarianceEstimate",
    "DdaaState", "EmpiricalEvaluation", "EpsilonSearchEntry",
    "ExperimentSpec", "InterferenceGram", "LeadfieldMatrix",
    "OnlineRunResult", "RegimeReport", "RzfSolveReport", "Scenario",
    "SignalBlock", "SingleInterferenceGeometry", "SourceModel",
    "SweepResult", "SweepRow", "__version__",
    "a_mmse", "achieved_mse", "analytic_covariance", "build_from_channels",
    "build_toy", "calibrate_powers", "cnlms_step", "correlated_interference_cov",
    "ddaa_step", "default_epsilon_grid", "emit_csv", "empirical_mse",
    "epsilon_grid_search", "epsilon_mvdr", "generate_block",
    "geometry_from_scenario", "interference_gram", "leak_power_for_correlation",
    "leakage", "leakage_decomposition", "load_leadfield", "mmse_dr",
    "mse_closed_form", "mse_of_lambda", "mvdr", "nominal_snr_sir",
    "per_source_gamma", "read_sweep_csv", "reduce_to_2d", "regime",
    "run_online", "run_sweep", "rzf_from_epsilon", "rzf_from_lambda",
    "sample_covariance", "superiority_witness", "toy_doa_grid",
    "two_channel_scenario", "ula_steering", "zf",
]
