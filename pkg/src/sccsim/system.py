"""Cell topology, channels, beam containers, nomographic processing and the
physical uplink simulation used by Monte-Carlo oracles."""

import dataclasses

import numpy as np

from .errors import ContractError, DomainError

NOMOGRAPHIC_KINDS = ("arithmetic_mean", "weighted_sum", "geometric_mean", "polynomial", "euclidean_norm")


def _rng(seed):
    return np.random.Generator(np.random.PCG64(int(seed) & ((1 << 64) - 1)))


def _complex_normal(rng, shape):
    # unit per-entry variance: E|g|^2 = 1
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclasses.dataclass(frozen=True, eq=False)
class Topology:
    """Terminal distances in km plus the seed that produced them."""

    distances: np.ndarray
    placement_seed: int

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        if d.ndim != 1 or not np.all(np.isfinite(d)) or np.any(d <= 0):
            raise ContractError("distances must be a 1-d array of positive km values")
        d.setflags(write=False)
        object.__setattr__(self, "distances", d)
        object.__setattr__(self, "placement_seed", int(self.placement_seed))


@dataclasses.dataclass(frozen=True, eq=False)
class ChannelSet:
    """Uplink channels H_k, shape (K, N, M), with provenance."""

    matrices: np.ndarray
    fading_seed: int
    topology: Topology
    mode: str
    gains: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.matrices, dtype=complex)
        if h.ndim != 3:
            raise ContractError(f"channel matrices must have shape (K, N, M), got {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ContractError("channel matrices must be finite")
        g = np.asarray(self.gains, dtype=float)
        h.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "matrices", h)
        object.__setattr__(self, "gains", g)
        object.__setattr__(self, "fading_seed", int(self.fading_seed))

    @property
    def n_ues(self):
        return self.matrices.shape[0]

    @property
    def n_bs_antennas(self):
        return self.matrices.shape[1]

    @property
    def n_ue_antennas(self):
        return self.matrices.shape[2]


@dataclasses.dataclass(frozen=True, eq=False)
class TransmitBeams:
    """Computation beams W_k (K, M, L) and sensing beams v_{k,j} (K, J, M)."""

    comp_beams: np.ndarray
    sense_beams: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.comp_beams, dtype=complex)
        v = np.asarray(self.sense_beams, dtype=complex)
        if w.ndim != 3 or v.ndim != 3:
            raise ContractError(
                f"expected comp_beams (K, M, L) and sense_beams (K, J, M), got {w.shape} and {v.shape}"
            )
        if w.shape[0] != v.shape[0] or w.shape[1] != v.shape[2]:
            raise ContractError(
                f"inconsistent beam shapes: comp_beams {w.shape} vs sense_beams {v.shape}"
            )
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
            raise ContractError("beams must be finite")
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "comp_beams", w)
        object.__setattr__(self, "sense_beams", v)

    def power_per_ue(self):
        """Transmit power used by each terminal, ||W_k||_F^2 + sum_j ||v_kj||^2."""
        return (np.abs(self.comp_beams) ** 2).sum(axis=(1, 2)) + (np.abs(self.sense_beams) ** 2).sum(axis=(1, 2))


@dataclasses.dataclass(frozen=True, eq=False)
class ReceiveBeams:
    """Computation receiver Z (N, L) and sensing receivers u_{k,j} (K, J, N)."""

    comp_receiver: np.ndarray
    sense_receivers: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.comp_receiver, dtype=complex)
        u = np.asarray(self.sense_receivers, dtype=complex)
        if z.ndim != 2 or u.ndim != 3 or u.shape[2] != z.shape[0]:
            raise ContractError(
                f"expected comp_receiver (N, L) and sense_receivers (K, J, N), got {z.shape} and {u.shape}"
            )
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(u))):
            raise ContractError("receivers must be finite")
        z.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "comp_receiver", z)
        object.__setattr__(self, "sense_receivers", u)


@dataclasses.dataclass(frozen=True, eq=False)
class NomographicSpec:
    """One fused-function description: q = f(sum_k g_k(d_k)).

    n_sources (K) is needed by the post-processing of the mean-type kinds;
    for weighted kinds it is inferred from the weight vector if omitted.
    """

    kind: str
    weights: np.ndarray = None
    exponents: np.ndarray = None
    n_sources: int = None

    def __post_init__(self):
        if self.kind not in NOMOGRAPHIC_KINDS:
            raise ContractError(f"kind must be one of {NOMOGRAPHIC_KINDS}, got {self.kind!r}")
        weights = None if self.weights is None else np.asarray(self.weights, dtype=float)
        exponents = None if self.exponents is None else np.asarray(self.exponents, dtype=float)
        n = self.n_sources
        if self.kind in ("weighted_sum", "polynomial"):
            if weights is None:
                raise ContractError(f"{self.kind} requires weights")
            if n is None:
                n = weights.size
            if weights.shape != (n,):
                raise ContractError(f"weights must have length {n}")
        if self.kind == "polynomial":
            if exponents is None or exponents.shape != (n,):
                raise ContractError("polynomial requires exponents of length n_sources")
        if n is None:
            raise ContractError(f"{self.kind} requires n_sources")
        if weights is not None:
            weights.setflags(write=False)
        if exponents is not None:
            exponents.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "exponents", exponents)
        object.__setattr__(self, "n_sources", int(n))


def place_ues(config, seed):
    """Drop K terminals area-uniformly on the annulus [min_ue_distance, cell_radius].

    The radius law r = sqrt(d_min^2 + U * (R^2 - d_min^2)) makes the density
    uniform per unit area; distances are returned in km.
    """
    rng = _rng(seed)
    u = rng.random(config.n_ues)
    r_m = np.sqrt(config.min_ue_distance**2 + u * (config.cell_radius**2 - config.min_ue_distance**2))
    return Topology(distances=r_m / 1000.0, placement_seed=int(seed))


def path_loss_db(distance_km):
    """Urban macro path loss in dB for a distance in km: 128.1 + 37.6 log10(d)."""
    d = np.asarray(distance_km, dtype=float)
    if np.any(d <= 0):
        raise DomainError("path loss is defined for strictly positive distances")
    return 128.1 + 37.6 * np.log10(d)


def generate_channels(config, topology, seed):
    """Draw block-fading channels H_k = sqrt(g_k) G_k with i.i.d. CSCG G_k.

    g_k is 1 in normalized mode and the linear path-loss gain in geometric
    mode.  Regeneration with the same seed is bit-identical.
    """
    k, n, m = config.n_ues, config.n_bs_antennas, config.n_ue_antennas
    d = np.asarray(topology.distances, dtype=float)
    if d.shape != (k,):
        raise ContractError(f"topology holds {d.shape[0]} terminals, config wants {k}")
    lo, hi = config.min_ue_distance / 1000.0, config.cell_radius / 1000.0
    if np.any(d < lo - 1e-12) or np.any(d > hi + 1e-12):
        raise ContractError("topology distances fall outside [min_ue_distance, cell_radius]")
    if config.channel_mode == "geometric":
        gains = 10.0 ** (-path_loss_db(d) / 10.0)
    else:
        gains = np.ones(k)
    fading = _complex_normal(_rng(seed), (k, n, m))
    h = np.sqrt(gains)[:, None, None] * fading
    return ChannelSet(matrices=h, fading_seed=int(seed), topology=topology, mode=config.channel_mode, gains=gains)


def initial_transmit_beams(config):
    """Deterministic starting beams.

    Half the budget goes to the first computation stream on antenna 1 and the
    other half is split evenly over the sensing streams, so each terminal
    saturates its power budget exactly.
    """
    k, m = config.n_ues, config.n_ue_antennas
    l, j = config.n_comp_streams, config.n_sense_streams
    p = config.power_budget_per_ue
    w = np.zeros((k, m, l), dtype=complex)
    w[:, 0, 0] = np.sqrt(p / 2.0)
    v = np.zeros((k, j, m), dtype=complex)
    v[:, :, 0] = np.sqrt(p / (2.0 * j))[:, None]
    return TransmitBeams(comp_beams=w, sense_beams=v)


def target_value(spec, data):
    """Evaluate the fused target function q directly on raw measurements."""
    d = _check_nomographic_data(spec, data)
    if spec.kind == "arithmetic_mean":
        return float(np.mean(d))
    if spec.kind == "weighted_sum":
        return float(np.dot(spec.weights, d))
    if spec.kind == "geometric_mean":
        return float(np.prod(d) ** (1.0 / d.size))
    if spec.kind == "polynomial":
        return float(np.dot(spec.weights, d**spec.exponents))
    return float(np.linalg.norm(d))


def _check_nomographic_data(spec, data):
    d = np.asarray(data, dtype=float)
    if d.shape != (spec.n_sources,):
        raise ContractError(f"data must have length {spec.n_sources}, got shape {d.shape}")
    if spec.kind == "geometric_mean" and np.any(d <= 0):
        raise DomainError("geometric_mean requires strictly positive data")
    if spec.kind == "polynomial":
        with np.errstate(invalid="ignore"):
            powered = d**spec.exponents
        if not np.all(np.isfinite(powered)):
            raise DomainError("polynomial pre-processing left the real domain")
    return d


def preprocess(spec, data):
    """Per-source pre-processing g_k(d_k) applied before transmission."""
    d = _check_nomographic_data(spec, data)
    if spec.kind == "arithmetic_mean":
        return d.copy()
    if spec.kind == "weighted_sum":
        return spec.weights * d
    if spec.kind == "geometric_mean":
        return np.log(d)
    if spec.kind == "polynomial":
        return spec.weights * d**spec.exponents
    return d**2


def postprocess(spec, fused):
    """Post-processing f applied to the fused sum, recovering the target q."""
    x = float(fused)
    if spec.kind == "arithmetic_mean":
        return x / spec.n_sources
    if spec.kind in ("weighted_sum", "polynomial"):
        return x
    if spec.kind == "geometric_mean":
        return float(np.exp(x / spec.n_sources))
    if x < 0:
        raise DomainError("euclidean_norm post-processing needs a nonnegative sum")
    return float(np.sqrt(x))


def _check_uplink_shapes(channels, tx, comp_symbols, sense_symbols):
    k, n, m = channels.matrices.shape
    w, v = tx.comp_beams, tx.sense_beams
    if w.shape[0] != k or w.shape[1] != m:
        raise ContractError(f"beams built for {w.shape[:2]} do not match channels (K={k}, M={m})")
    l, j = w.shape[2], v.shape[1]
    s = np.asarray(comp_symbols, dtype=complex)
    sp = np.asarray(sense_symbols, dtype=complex)
    if s.shape[:2] != (k, l):
        raise ContractError(f"comp_symbols must start with shape ({k}, {l}), got {s.shape}")
    if sp.shape[:2] != (k, j):
        raise ContractError(f"sense_symbols must start with shape ({k}, {j}), got {sp.shape}")
    if s.ndim not in (2, 3) or sp.ndim != s.ndim:
        raise ContractError("symbol arrays must both be per-shot or both batched")
    return s, sp


def simulate_uplink(channels, tx, comp_symbols, sense_symbols, noise_power, noise_seed):
    """One physical uplink shot: y = sum_k H_k (W_k s_k + sum_j v_kj s'_kj) + n.

    Noise is circularly-symmetric complex Gaussian with covariance
    noise_power * I, drawn deterministically from noise_seed.
    """
    s, sp = _check_uplink_shapes(channels, tx, comp_symbols, sense_symbols)
    if s.ndim != 2:
        raise ContractError("simulate_uplink takes single-shot symbols; use simulate_uplink_batch")
    y = simulate_uplink_batch(channels, tx, s[:, :, None], sp[:, :, None], noise_power, noise_seed)
    return y[:, 0]


def simulate_uplink_batch(channels, tx, comp_symbols, sense_symbols, noise_power, noise_seed):
    """Vectorized uplink shots; symbol arrays carry a trailing draw axis T."""
    s, sp = _check_uplink_shapes(channels, tx, comp_symbols, sense_symbols)
    if s.ndim != 3:
        raise ContractError("batched symbols need a trailing draw axis")
    if noise_power < 0:
        raise DomainError("noise_power must be >= 0")
    k, n, _ = channels.matrices.shape
    t = s.shape[2]
    y = np.zeros((n, t), dtype=complex)
    for i in range(k):
        x = tx.comp_beams[i] @ s[i] + tx.sense_beams[i].T @ sp[i]
        y += channels.matrices[i] @ x
    if noise_power > 0:
        y += np.sqrt(noise_power) * _complex_normal(_rng(noise_seed), (n, t))
    return y
