import numpy as np
import pytest

from sccsim.config import SystemConfig
from sccsim.seeds import FADING_STREAM, PLACEMENT_STREAM, substream_seed
from sccsim.system import ChannelSet, TransmitBeams, generate_channels, place_ues


def make_config(**kw):
    args = dict(n_bs_antennas=8, n_ues=4, n_ue_antennas=2)
    args.update(kw)
    return SystemConfig(**args)


def make_instance(config, seed):
    """Topology + channels under the same substream tags the harness uses."""
    topo = place_ues(config, substream_seed(seed, PLACEMENT_STREAM))
    ch = generate_channels(config, topo, substream_seed(seed, FADING_STREAM))
    return topo, ch


def manual_channels(matrices):
    """ChannelSet straight from matrices, for hand-built instances."""
    h = np.asarray(matrices, dtype=complex)
    return ChannelSet(
        matrices=h,
        fading_seed=0,
        topology=None,
        mode="normalized",
        gains=np.ones(h.shape[0]),
    )


def random_feasible_beams(config, rng, margin=0.9):
    """Random transmit beams strictly inside every power budget."""
    k, m = config.n_ues, config.n_ue_antennas
    l, j = config.n_comp_streams, config.n_sense_streams
    w = rng.standard_normal((k, m, l)) + 1j * rng.standard_normal((k, m, l))
    v = rng.standard_normal((k, j, m)) + 1j * rng.standard_normal((k, j, m))
    used = (np.abs(w) ** 2).sum(axis=(1, 2)) + (np.abs(v) ** 2).sum(axis=(1, 2))
    scale = np.sqrt(margin * config.power_budget_per_ue / used)
    return TransmitBeams(w * scale[:, None, None], v * scale[:, None, None])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
