import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sccsim.config import SystemConfig
from sccsim.errors import ConfigError, ContractError, DomainError
from sccsim.system import (
    NOMOGRAPHIC_KINDS,
    ChannelSet,
    NomographicSpec,
    ReceiveBeams,
    Topology,
    TransmitBeams,
    generate_channels,
    initial_transmit_beams,
    path_loss_db,
    place_ues,
    postprocess,
    preprocess,
    simulate_uplink,
    simulate_uplink_batch,
    target_value,
)

from conftest import make_config, make_instance


# ---------------------------------------------------------------------------
# SystemConfig


def test_config_defaults_are_valid():
    cfg = SystemConfig()
    assert cfg.n_bs_antennas == 16 and cfg.n_ues == 8
    assert cfg.power_budget_per_ue.shape == (8,)
    assert cfg.rate_thresholds.shape == (8, 1)
    assert cfg.priorities.shape == (8, 1)


@pytest.mark.parametrize(
    "bad",
    [
        dict(n_bs_antennas=0),
        dict(n_ues=-1),
        dict(n_ue_antennas=1.5),
        dict(noise_power=0.0),
        dict(power_budget_per_ue=[1.0, -1.0, 1.0, 1.0], n_ues=4),
        dict(rate_thresholds=-0.1),
        dict(rate_thresholds=math.inf),
        dict(priorities=0.0),
        dict(mse_budget=-1.0),
        dict(mse_budget=math.nan),
        dict(min_ue_distance=600.0),
        dict(interference_model="nope"),
        dict(channel_mode="fancy"),
    ],
)
def test_config_rejects_invalid_fields(bad):
    with pytest.raises(ConfigError):
        SystemConfig(**bad)


def test_config_broadcasts_per_ue_and_per_stream():
    cfg = SystemConfig(n_ues=3, n_sense_streams=2, power_budget_per_ue=2.0, rate_thresholds=0.25)
    assert cfg.power_budget_per_ue.tolist() == [2.0, 2.0, 2.0]
    assert cfg.rate_thresholds.shape == (3, 2)
    assert np.all(cfg.rate_thresholds == 0.25)


def test_sinr_targets_formula():
    cfg = SystemConfig(rate_thresholds=1.0)
    assert np.allclose(cfg.sinr_targets, 1.0)  # 2^1 - 1
    cfg = SystemConfig(rate_thresholds=0.0)
    assert np.all(cfg.sinr_targets == 0.0)


def test_with_snr_db_sets_budget_from_noise():
    cfg = SystemConfig(noise_power=1.0).with_snr_db(5.0)
    assert np.allclose(cfg.power_budget_per_ue, 10.0 ** 0.5)
    cfg2 = SystemConfig(noise_power=2.0).with_snr_db(0.0)
    assert np.allclose(cfg2.power_budget_per_ue, 2.0)


def test_with_snr_db_rejected_in_geometric_mode():
    with pytest.raises(ConfigError):
        SystemConfig(channel_mode="geometric").with_snr_db(5.0)


def test_replace_revalidates():
    cfg = SystemConfig()
    with pytest.raises(ConfigError):
        cfg.replace(noise_power=-1.0)


def test_config_arrays_are_read_only():
    cfg = SystemConfig()
    with pytest.raises(ValueError):
        cfg.power_budget_per_ue[0] = 5.0


# ---------------------------------------------------------------------------
# placement and path loss


def test_place_ues_within_cell():
    cfg = SystemConfig(n_ues=32, cell_radius=500.0)
    topo = place_ues(cfg, 99)
    d = np.asarray(topo.distances)
    assert np.all(d <= 0.5) and np.all(d >= cfg.min_ue_distance / 1000.0)


def test_place_ues_deterministic():
    cfg = make_config()
    a = place_ues(cfg, 7)
    b = place_ues(cfg, 7)
    assert np.array_equal(np.asarray(a.distances), np.asarray(b.distances))
    assert not np.array_equal(np.asarray(a.distances), np.asarray(place_ues(cfg, 8).distances))


def test_place_ues_area_uniform_second_moment():
    # area-uniform radius law: E[d^2] = (R^2 + d_min^2) / 2
    cfg = SystemConfig(n_ues=100_000, cell_radius=500.0, min_ue_distance=10.0)
    d = np.asarray(place_ues(cfg, 3).distances)
    expected = (0.5**2 + 0.01**2) / 2.0
    assert abs((d**2).mean() - expected) <= 0.01 * expected


def test_topology_rejects_nonpositive_distances():
    with pytest.raises(ContractError):
        Topology(distances=np.array([0.2, 0.0]), placement_seed=0)


def test_generate_channels_rejects_out_of_cell_topology():
    cfg = SystemConfig(n_ues=1)  # default cell radius 500 m
    topo = Topology(distances=np.array([0.6]), placement_seed=0)
    with pytest.raises(ContractError):
        generate_channels(cfg, topo, 0)


def test_path_loss_reference_points():
    assert math.isclose(path_loss_db(0.1), 90.5, abs_tol=1e-12)
    assert math.isclose(path_loss_db(1.0), 128.1, abs_tol=1e-12)
    assert math.isclose(path_loss_db(0.5), 116.781, abs_tol=1e-3)


def test_path_loss_rejects_nonpositive():
    with pytest.raises(DomainError):
        path_loss_db(0.0)
    with pytest.raises(DomainError):
        path_loss_db(-1.0)


# ---------------------------------------------------------------------------
# channels


def test_generate_channels_shapes_and_determinism():
    cfg = make_config()
    topo, ch = make_instance(cfg, 0)
    assert ch.matrices.shape == (4, 8, 2)
    again = generate_channels(cfg, topo, ch.fading_seed)
    assert np.array_equal(again.matrices, ch.matrices)


def test_generate_channels_normalized_unit_variance():
    cfg = SystemConfig(n_ues=10, n_bs_antennas=100, n_ue_antennas=100)
    topo = place_ues(cfg, 1)
    ch = generate_channels(cfg, topo, 2)
    power = np.mean(np.abs(ch.matrices) ** 2)
    assert abs(power - 1.0) <= 0.02


def test_generate_channels_geometric_gain():
    cfg = SystemConfig(
        n_ues=10, n_bs_antennas=100, n_ue_antennas=100, channel_mode="geometric"
    )
    topo = Topology(distances=np.full(10, 0.1), placement_seed=0)
    ch = generate_channels(cfg, topo, 5)
    power = np.mean(np.abs(ch.matrices) ** 2)
    expected = 10.0 ** (-9.05)  # linear gain at 90.5 dB loss
    assert abs(power - expected) <= 0.02 * expected


def test_generate_channels_dimension_mismatch():
    cfg = make_config()
    topo = Topology(distances=np.full(3, 0.2), placement_seed=0)
    with pytest.raises(ContractError):
        generate_channels(cfg, topo, 0)


def test_channelset_rejects_nonfinite():
    with pytest.raises(ContractError):
        ChannelSet(
            matrices=np.full((1, 2, 2), np.nan, dtype=complex),
            fading_seed=0,
            topology=None,
            mode="normalized",
            gains=np.ones(1),
        )


# ---------------------------------------------------------------------------
# beams


def test_initial_beams_saturate_budget_exactly():
    cfg = make_config(n_sense_streams=3, power_budget_per_ue=[1.0, 2.0, 0.5, 4.0])
    tx = initial_transmit_beams(cfg)
    used = tx.power_per_ue()
    assert np.all(np.abs(used - cfg.power_budget_per_ue) <= 1e-12 * cfg.power_budget_per_ue)


def test_initial_beams_pinned_entries():
    cfg = make_config(n_ues=1, power_budget_per_ue=1.0)
    tx = initial_transmit_beams(cfg)
    assert np.allclose(tx.comp_beams[0], [[math.sqrt(0.5)], [0.0]])
    assert np.allclose(tx.sense_beams[0, 0], [math.sqrt(0.5), 0.0])


def test_transmit_beams_reject_bad_shapes():
    with pytest.raises(ContractError):
        TransmitBeams(np.zeros((2, 2)), np.zeros((2, 1, 2)))
    with pytest.raises(ContractError):
        TransmitBeams(np.full((1, 2, 1), np.inf), np.zeros((1, 1, 2)))


def test_receive_beams_reject_bad_shapes():
    with pytest.raises(ContractError):
        ReceiveBeams(np.zeros((4, 1)), np.zeros((2, 1, 3)))  # u length != N


# ---------------------------------------------------------------------------
# nomographic functions


def test_nomographic_pinned_examples():
    assert target_value(NomographicSpec("arithmetic_mean", n_sources=2), [1.0, 3.0]) == 2.0
    spec = NomographicSpec("geometric_mean", n_sources=2)
    fused = preprocess(spec, [2.0, 8.0]).sum()
    assert math.isclose(postprocess(spec, fused), 4.0, rel_tol=1e-12)
    spec = NomographicSpec("euclidean_norm", n_sources=2)
    assert math.isclose(postprocess(spec, preprocess(spec, [3.0, 4.0]).sum()), 5.0, rel_tol=1e-12)


@pytest.mark.parametrize("kind", NOMOGRAPHIC_KINDS)
def test_nomographic_round_trip(kind):
    rng = np.random.default_rng(17)
    for _ in range(20):
        k = int(rng.integers(1, 6))
        data = rng.uniform(0.1, 3.0, size=k)
        spec = NomographicSpec(
            kind,
            weights=rng.uniform(0.5, 2.0, size=k) if kind in ("weighted_sum", "polynomial") else None,
            exponents=rng.uniform(0.5, 2.0, size=k) if kind == "polynomial" else None,
            n_sources=k,
        )
        direct = target_value(spec, data)
        fused = float(np.sum(preprocess(spec, data)))
        assert math.isclose(postprocess(spec, fused), direct, rel_tol=1e-10, abs_tol=1e-12)


def test_geometric_mean_domain_error():
    spec = NomographicSpec("geometric_mean", n_sources=2)
    with pytest.raises(DomainError):
        preprocess(spec, [1.0, -1.0])


def test_nomographic_spec_validation():
    with pytest.raises(ContractError):
        NomographicSpec("weighted_sum", n_sources=2)  # weights missing
    with pytest.raises(ContractError):
        NomographicSpec("polynomial", weights=[1.0, 1.0], n_sources=2)  # exponents missing
    with pytest.raises(ContractError):
        NomographicSpec("median", n_sources=2)


# ---------------------------------------------------------------------------
# uplink simulation


def _scalar_chain():
    ch = ChannelSet(
        matrices=np.ones((1, 1, 1), dtype=complex),
        fading_seed=0,
        topology=None,
        mode="normalized",
        gains=np.ones(1),
    )
    tx = TransmitBeams(np.ones((1, 1, 1), dtype=complex), np.zeros((1, 1, 1), dtype=complex))
    return ch, tx


def test_simulate_uplink_identity_chain():
    ch, tx = _scalar_chain()
    y = simulate_uplink(ch, tx, np.ones((1, 1)), np.zeros((1, 1)), 0.0, 0)
    assert np.allclose(y, [1.0])


def test_simulate_uplink_zero_beams_noise_only():
    ch, _ = _scalar_chain()
    tx = TransmitBeams(np.zeros((1, 1, 1), dtype=complex), np.zeros((1, 1, 1), dtype=complex))
    y = simulate_uplink(ch, tx, np.zeros((1, 1)), np.zeros((1, 1)), 4.0, 11)
    y2 = simulate_uplink(ch, tx, np.ones((1, 1)) * 9.0, np.ones((1, 1)), 4.0, 11)
    assert np.array_equal(y, y2)  # symbols do not reach the output
    assert np.abs(y[0]) > 0


def test_simulate_uplink_noise_covariance():
    cfg = make_config(n_ues=1, n_bs_antennas=3)
    _, ch = make_instance(cfg, 4)
    tx = TransmitBeams(np.zeros((1, 2, 1), dtype=complex), np.zeros((1, 1, 2), dtype=complex))
    t = 100_000
    y = simulate_uplink_batch(
        ch, tx, np.zeros((1, 1, t)), np.zeros((1, 1, t)), 2.0, 13
    )
    cov = (y @ y.conj().T) / t
    assert np.linalg.norm(cov - 2.0 * np.eye(3)) <= 0.02 * np.linalg.norm(2.0 * np.eye(3)) * 3


def test_simulate_uplink_shape_errors():
    ch, tx = _scalar_chain()
    with pytest.raises(ContractError):
        simulate_uplink(ch, tx, np.ones((2, 1)), np.zeros((1, 1)), 1.0, 0)
    with pytest.raises(DomainError):
        simulate_uplink(ch, tx, np.ones((1, 1)), np.zeros((1, 1)), -1.0, 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32))
def test_simulate_uplink_deterministic_per_seed(seed):
    ch, tx = _scalar_chain()
    a = simulate_uplink(ch, tx, np.ones((1, 1)), np.zeros((1, 1)), 1.0, seed)
    b = simulate_uplink(ch, tx, np.ones((1, 1)), np.zeros((1, 1)), 1.0, seed)
    assert np.array_equal(a, b)
