"""System-level configuration for the uplink model.

All dimensions, budgets and thresholds used across the package live in
SystemConfig.  Scalars given for per-UE or per-stream quantities are
broadcast to full arrays on construction, so downstream code can always
assume shapes (K,) and (K, J).
"""

import dataclasses
import math

import numpy as np

from .errors import ConfigError

INTERFERENCE_MODELS = ("all_cross_streams", "paper_literal")
CHANNEL_MODES = ("normalized", "geometric")

# relative tolerance for declaring a constraint satisfied in reports
REPORT_RTOL = 1e-6


def _as_per_ue(value, n_ues, name):
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size == 1:
        arr = np.full(n_ues, float(arr[0]))
    if arr.shape != (n_ues,):
        raise ConfigError(f"{name} must be a scalar or length-{n_ues} list, got shape {arr.shape}")
    return arr


def _as_per_stream(value, n_ues, n_streams, name):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full((n_ues, n_streams), float(arr))
    elif arr.shape != (n_ues, n_streams):
        raise ConfigError(
            f"{name} must be a scalar or a {n_ues}x{n_streams} array, got shape {arr.shape}"
        )
    return arr


@dataclasses.dataclass(frozen=True, eq=False)
class SystemConfig:
    """Static description of one uplink scenario.

    Attributes
    ----------
    n_bs_antennas : int
        Receive antennas at the base station (N).
    n_ues : int
        Number of user terminals (K).
    n_ue_antennas : int
        Transmit antennas per terminal (M).
    n_comp_streams : int
        Computation streams fused over the air (L).
    n_sense_streams : int
        Sensing streams per terminal (J).
    noise_power : float
        Receiver noise power in watts.
    power_budget_per_ue : array (K,)
        Transmit power budget per terminal in watts.
    rate_thresholds : array (K, J)
        Minimum sensing rate per stream in bit/s/Hz; 0 disables the constraint.
    priorities : array (K, J)
        Positive rate weights for the sum-rate objective.
    mse_budget : float
        Maximum tolerable fused-computation MSE; ``inf`` disables the budget.
    cell_radius : float
        Cell radius in meters (geometric channel mode).
    min_ue_distance : float
        Minimum terminal distance in meters (geometric channel mode).
    interference_model : str
        Which cross-stream terms count as sensing interference.
    channel_mode : str
        "normalized" for unit-gain fading, "geometric" to apply path loss.
    """

    n_bs_antennas: int = 16
    n_ues: int = 8
    n_ue_antennas: int = 2
    n_comp_streams: int = 1
    n_sense_streams: int = 1
    noise_power: float = 1.0
    power_budget_per_ue: object = 1.0
    rate_thresholds: object = 0.5
    priorities: object = 1.0
    mse_budget: float = math.inf
    cell_radius: float = 500.0
    min_ue_distance: float = 10.0
    interference_model: str = "all_cross_streams"
    channel_mode: str = "normalized"

    def __post_init__(self):
        for name in ("n_bs_antennas", "n_ues", "n_ue_antennas", "n_comp_streams", "n_sense_streams"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not self.noise_power > 0:
            raise ConfigError(f"noise_power must be > 0, got {self.noise_power}")
        object.__setattr__(self, "noise_power", float(self.noise_power))

        k, j = self.n_ues, self.n_sense_streams
        power = _as_per_ue(self.power_budget_per_ue, k, "power_budget_per_ue")
        if not np.all(power > 0):
            raise ConfigError("every power budget must be > 0")
        rates = _as_per_stream(self.rate_thresholds, k, j, "rate_thresholds")
        if not np.all(np.isfinite(rates)) or np.any(rates < 0):
            raise ConfigError("rate thresholds must be finite and >= 0")
        prio = _as_per_stream(self.priorities, k, j, "priorities")
        if not np.all(prio > 0):
            raise ConfigError("every priority must be > 0")
        for arr in (power, rates, prio):
            arr.setflags(write=False)
        object.__setattr__(self, "power_budget_per_ue", power)
        object.__setattr__(self, "rate_thresholds", rates)
        object.__setattr__(self, "priorities", prio)

        rho = float(self.mse_budget)
        if math.isnan(rho) or rho < 0:
            raise ConfigError(f"mse_budget must be >= 0 or inf, got {self.mse_budget}")
        object.__setattr__(self, "mse_budget", rho)

        if not 0 < self.min_ue_distance < self.cell_radius:
            raise ConfigError("need 0 < min_ue_distance < cell_radius")
        if self.interference_model not in INTERFERENCE_MODELS:
            raise ConfigError(f"interference_model must be one of {INTERFERENCE_MODELS}")
        if self.channel_mode not in CHANNEL_MODES:
            raise ConfigError(f"channel_mode must be one of {CHANNEL_MODES}")

    @property
    def sinr_targets(self):
        """Per-stream SINR targets, 2^r - 1, shape (K, J)."""
        return np.exp2(self.rate_thresholds) - 1.0

    def replace(self, **changes):
        """Return a copy with the given fields replaced and revalidated."""
        return dataclasses.replace(self, **changes)

    def with_snr_db(self, snr_db):
        """Set every power budget to noise_power * 10^(snr/10).

        Only meaningful for normalized channels, where the budget-to-noise
        ratio is the transmit SNR; rejected in geometric mode.
        """
        if self.channel_mode != "normalized":
            raise ConfigError("snr_db sets power budgets only in normalized channel mode")
        return self.replace(power_budget_per_ue=self.noise_power * 10.0 ** (snr_db / 10.0))
