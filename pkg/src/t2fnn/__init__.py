"""Interval type-2 TSK fuzzy network with sliding-mode online learning.

The package provides the network data model and inference
(:mod:`t2fnn.network`), a fully sliding-mode online learner
(:mod:`t2fnn.smc`), a gradient-descent baseline (:mod:`t2fnn.gradient`),
two benchmark plants (:mod:`t2fnn.plants`), an identification experiment
harness (:mod:`t2fnn.experiment`), a scikit-learn style estimator
(:mod:`t2fnn.estimator`) and a CLI (``t2fnn``).
"""

from .errors import (DegenerateFiringError, DivergedError, EmptySequenceError,
                     NonFiniteUpdateError, T2FNNError)
from .estimator import T2FNNRegressor
from .experiment import (ExperimentConfig, ExperimentReport, build_regressor,
                         rmse, run_experiment)
from .gradient import GdParams, gd_gradients, gd_step
from .network import (InferenceCache, NetworkState, RuleConsequent,
                      Type2GaussianMF, eval_mf, firing_strengths, infer,
                      normalize, rule_outputs)
from .plants import (PlantState, bounded_sup_check, input_ex1, input_ex2,
                     step_nonbibo, step_timevarying)
from .smc import (SmcParams, StabilityBounds, StepDiagnostics, error_band,
                  smc_step, smooth_sign)

__version__ = "0.1.0"

__all__ = [
    "DegenerateFiringError", "DivergedError", "EmptySequenceError",
    "NonFiniteUpdateError", "T2FNNError",
    "T2FNNRegressor",
    "ExperimentConfig", "ExperimentReport", "build_regressor", "rmse",
    "run_experiment",
    "GdParams", "gd_gradients", "gd_step",
    "InferenceCache", "NetworkState", "RuleConsequent", "Type2GaussianMF",
    "eval_mf", "firing_strengths", "infer", "normalize", "rule_outputs",
    "PlantState", "bounded_sup_check", "input_ex1", "input_ex2",
    "step_nonbibo", "step_timevarying",
    "SmcParams", "StabilityBounds", "StepDiagnostics", "error_band",
    "smc_step", "smooth_sign",
    "__version__",
]
