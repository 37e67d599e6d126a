"""Scikit-learn style front end.

:class:`T2FNNRegressor` wraps the interval type-2 network and the online
learners behind the standard fit/predict API so the model composes with
pipelines, grid search and cloning. ``fit`` performs sequential online
passes over the samples in the order given (the data is treated as a time
series; no shuffling), ``partial_fit`` continues training, and ``predict``
runs the frozen network.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .errors import NonFiniteUpdateError
from .experiment import (ExperimentConfig, OnlineTrainer, backward_differences,
                         initialize_network, rmse)
from .gradient import GdParams
from .smc import SmcParams


class T2FNNRegressor(RegressorMixin, BaseEstimator):
    """Online interval type-2 TSK regressor.

    Parameters
    ----------
    n_mfs : int
        Fuzzy sets per input; the rule base is the full grid
        ``n_mfs ** n_features``.
    learner : {"smc", "gd"}
        Sliding-mode or gradient-descent parameter updates.
    epochs : int
        Full passes over the training samples per ``fit`` call.
    gamma, nu, delta_s, rho_ant, denom_guard, dt, sigma_floor, alpha_init
        Sliding-mode gains and safeguards (see :class:`t2fnn.smc.SmcParams`).
    eta, eta_ant
        Gradient-descent step sizes (consequent / antecedent).
    q_init : float
        Initial lower/upper mixing weight.
    random_state : int or None
        Seed for the network initialization.
    """

    def __init__(self, n_mfs=3, learner="smc", epochs=1, gamma=1.0, nu=0.5,
                 delta_s=0.05, rho_ant=0.1, denom_guard=0.001, dt=0.001,
                 sigma_floor=1e-3, alpha_init=0.0, eta=0.5, eta_ant=0.05,
                 q_init=0.5, random_state=None):
        self.n_mfs = n_mfs
        self.learner = learner
        self.epochs = epochs
        self.gamma = gamma
        self.nu = nu
        self.delta_s = delta_s
        self.rho_ant = rho_ant
        self.denom_guard = denom_guard
        self.dt = dt
        self.sigma_floor = sigma_floor
        self.alpha_init = alpha_init
        self.eta = eta
        self.eta_ant = eta_ant
        self.q_init = q_init
        self.random_state = random_state

    def _params(self):
        smc = SmcParams(gamma=self.gamma, nu=self.nu, delta_s=self.delta_s,
                        rho_ant=self.rho_ant, denom_guard=self.denom_guard,
                        dt=self.dt, sigma_floor=self.sigma_floor,
                        alpha_init=self.alpha_init)
        gd = GdParams(eta=self.eta, eta_ant=self.eta_ant,
                      sigma_floor=self.sigma_floor)
        return smc, gd

    def fit(self, X, y):
        """Train online over ``epochs`` sequential passes of (X, y)."""
        X, y = check_X_y(X, y, y_numeric=True)
        if self.learner not in ("smc", "gd"):
            raise ValueError(f"unknown learner {self.learner!r}")
        smc, gd = self._params()
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.float64)
        self.n_features_in_ = X.shape[1]

        rng = np.random.default_rng(self.random_state)
        init_cfg = ExperimentConfig(n_mfs=self.n_mfs, q_init=self.q_init,
                                    smc=smc, gd=gd)
        net0 = initialize_network(rng, X, init_cfg)
        self._trainer = OnlineTrainer(net0, self.learner, smc, gd)
        self.epoch_rmse_ = np.array([self._pass(X, y) for _ in range(self.epochs)])
        self.state_ = self._trainer.state()
        return self

    def partial_fit(self, X, y):
        """Continue online training with more sequential samples."""
        if not hasattr(self, "_trainer"):
            return self.fit(X, y)
        X, y = check_X_y(X, y, y_numeric=True)
        if X.shape[1] != self.n_features_in_:
            raise ValueError("feature count changed between calls")
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.float64)
        self._pass(X, y)
        self.state_ = self._trainer.state()
        return self

    def _pass(self, X, y):
        x_dot = backward_differences(X, self.dt)
        errs = np.empty(len(y))
        for k in range(len(y)):
            e = self._trainer.step(X[k], x_dot[k], y[k])
            if e != e:
                raise NonFiniteUpdateError(f"non-finite update at sample {k}")
            errs[k] = e
        return rmse(errs)

    def predict(self, X):
        """Frozen network output for each row of ``X``."""
        check_is_fitted(self, "state_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        X = np.ascontiguousarray(X, dtype=np.float64)
        out = np.empty(X.shape[0])
        for k in range(X.shape[0]):
            out[k] = self._trainer.predict(X[k])
        return out

    @property
    def network_(self):
        """Fitted network state (raises before fit)."""
        if not hasattr(self, "state_"):
            raise NotFittedError("estimator is not fitted yet")
        return self.state_
