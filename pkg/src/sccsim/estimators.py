"""Estimator-style wrappers over the functional solvers.

These follow the scikit-learn parameter protocol (get_params/set_params,
fit(X) -> self, trailing-underscore fitted attributes) without importing
scikit-learn.  X is a ChannelSet; the "model" is the fitted beam pair.
Hyperparameters are the system configuration and solver options.
"""

import inspect

from .config import SystemConfig
from .errors import ContractError
from .metrics import aircomp_mse, weighted_sum_rate
from .optimizers import OptimizerOptions, run_cem, run_wsr


class BeamformingEstimator:
    """Parameter-protocol base: introspects __init__ for parameter names."""

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return sorted(name for name in sig.parameters if name != "self")

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = self._param_names()
        for name, value in params.items():
            if name not in valid:
                raise ContractError(
                    f"invalid parameter {name!r} for {type(self).__name__}; "
                    f"valid parameters are {valid}"
                )
            setattr(self, name, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

    def _resolved(self):
        config = self.config
        if config is None:
            config = SystemConfig()
        if not isinstance(config, SystemConfig):
            raise ContractError(f"config must be a SystemConfig, got {type(config).__name__}")
        options = self.options
        if options is None:
            options = OptimizerOptions()
        return config, options

    def _store(self, outcome):
        self.transmit_beams_ = outcome.transmit_beams
        self.receive_beams_ = outcome.receive_beams
        self.trace_ = outcome.trace
        self.n_iter_ = outcome.n_iterations
        self.status_ = outcome.status
        self.converged_ = outcome.converged
        self.certificate_ = outcome.certificate
        return self

    def _check_fitted(self):
        if not hasattr(self, "transmit_beams_"):
            raise ContractError(f"{type(self).__name__} is not fitted; call fit first")


class ComputationErrorMinimizer(BeamformingEstimator):
    """Fused-computation-error beamformer.

    fit(X) runs the alternating minimization on the channel set X; score(X)
    is the negative fused MSE of the fitted beams on X (higher is better,
    per estimator convention).
    """

    def __init__(self, config=None, options=None):
        self.config = config
        self.options = options

    def fit(self, X, y=None):
        config, options = self._resolved()
        return self._store(run_cem(config, X, options))

    def score(self, X, y=None):
        self._check_fitted()
        config, _ = self._resolved()
        return -aircomp_mse(self.receive_beams_, self.transmit_beams_, X, config.noise_power)


class WeightedSumRateMaximizer(BeamformingEstimator):
    """Weighted sum-rate beamformer; score(X) is the fitted beams' weighted
    sum rate on X."""

    def __init__(self, config=None, options=None):
        self.config = config
        self.options = options

    def fit(self, X, y=None):
        config, options = self._resolved()
        return self._store(run_wsr(config, X, options))

    def score(self, X, y=None):
        self._check_fitted()
        config, _ = self._resolved()
        return weighted_sum_rate(
            self.receive_beams_,
            self.transmit_beams_,
            X,
            config.noise_power,
            config.priorities,
            config.interference_model,
        )


class BaselineBeamformer(BeamformingEstimator):
    """One of the reference schemes behind the same estimator surface.

    score(X) follows objective_mode: negative fused MSE for "cem", weighted
    sum rate for "wsr".
    """

    def __init__(self, kind="fixed_mmse", objective_mode="cem", config=None, options=None):
        self.kind = kind
        self.objective_mode = objective_mode
        self.config = config
        self.options = options

    def fit(self, X, y=None):
        from .baselines import BaselineVariant, run_baseline

        config, options = self._resolved()
        variant = BaselineVariant(kind=self.kind, objective_mode=self.objective_mode)
        return self._store(run_baseline(variant, config, X, options))

    def score(self, X, y=None):
        self._check_fitted()
        config, _ = self._resolved()
        if self.objective_mode == "cem":
            return -aircomp_mse(self.receive_beams_, self.transmit_beams_, X, config.noise_power)
        return weighted_sum_rate(
            self.receive_beams_,
            self.transmit_beams_,
            X,
            config.noise_power,
            config.priorities,
            config.interference_model,
        )
