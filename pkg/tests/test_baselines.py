import numpy as np
import pytest

from sccsim.baselines import (
    BaselineVariant,
    matched_filter_beams,
    run_baseline,
    uniform_forcing_beams,
)
from sccsim.errors import ContractError, DimensionalityError
from sccsim.metrics import mmse_receive_beams
from sccsim.optimizers import OptimizerOptions
from sccsim.system import initial_transmit_beams

from conftest import make_config, make_instance


def desk(**kw):
    base = dict(n_bs_antennas=8, n_ues=4, n_ue_antennas=2, rate_thresholds=0.0)
    base.update(kw)
    return make_config(**base).with_snr_db(5.0)


def test_variant_validation():
    with pytest.raises(ContractError):
        BaselineVariant("dirty_paper")
    with pytest.raises(ContractError):
        BaselineVariant("zfbf", "throughput")
    v = BaselineVariant("mfbf", "wsr")
    assert v.kind == "mfbf"


def test_fixed_mmse_is_single_pass():
    cfg = desk()
    _, ch = make_instance(cfg, 0)
    out = run_baseline(BaselineVariant("fixed_mmse"), cfg, ch)
    assert out.status == "converged" and out.converged
    assert out.n_iterations == 1
    tx0 = initial_transmit_beams(cfg)
    assert np.array_equal(out.transmit_beams.comp_beams, tx0.comp_beams)
    assert np.array_equal(out.transmit_beams.sense_beams, tx0.sense_beams)
    rx = mmse_receive_beams(tx0, ch, cfg.noise_power)
    assert np.allclose(out.receive_beams.comp_receiver, rx.comp_receiver)


def test_zfbf_nulls_cross_streams():
    cfg = desk()
    _, ch = make_instance(cfg, 1)
    out = run_baseline(BaselineVariant("zfbf"), cfg, ch)
    z = out.receive_beams.comp_receiver
    u = out.receive_beams.sense_receivers
    w = out.transmit_beams.comp_beams
    v = out.transmit_beams.sense_beams
    for k in range(4):
        # computation chain passes each terminal at unit gain and rejects
        # every sensing stream
        assert abs(z[:, 0].conj() @ ch.matrices[k] @ w[k, :, 0] - 1.0) <= 1e-8
        assert abs(z[:, 0].conj() @ ch.matrices[k] @ v[k, 0]) <= 1e-8
        for i in range(4):
            own = u[k, 0].conj() @ ch.matrices[i] @ v[i, 0]
            want = 1.0 if i == k else 0.0
            assert abs(own - want) <= 1e-8
            assert abs(u[k, 0].conj() @ ch.matrices[i] @ w[i, :, 0]) <= 1e-8


def test_zfbf_needs_enough_antennas():
    cfg = make_config(n_bs_antennas=4, n_ues=4, rate_thresholds=0.0)
    _, ch = make_instance(cfg, 0)
    with pytest.raises(DimensionalityError):
        run_baseline(BaselineVariant("zfbf"), cfg, ch)


def test_matched_filters_unit_norm():
    cfg = desk()
    _, ch = make_instance(cfg, 2)
    rx = matched_filter_beams(initial_transmit_beams(cfg), ch, cfg.noise_power)
    assert np.linalg.norm(rx.comp_receiver[:, 0]) == pytest.approx(1.0, rel=1e-12)
    assert np.allclose(np.linalg.norm(rx.sense_receivers, axis=2), 1.0)


def test_matched_filters_zero_beams():
    cfg = desk()
    _, ch = make_instance(cfg, 2)
    tx = initial_transmit_beams(cfg)
    zero = type(tx)(np.zeros_like(tx.comp_beams), np.zeros_like(tx.sense_beams))
    rx = matched_filter_beams(zero, ch, cfg.noise_power)
    assert np.all(rx.comp_receiver == 0)
    assert np.all(rx.sense_receivers == 0)


def test_uniform_forcing_equalizes_gains():
    cfg = desk()
    _, ch = make_instance(cfg, 3)
    out = run_baseline(BaselineVariant("ufbf"), cfg, ch, OptimizerOptions(max_iterations=30))
    z = out.receive_beams.comp_receiver
    gains = [
        abs(z[:, 0].conj() @ ch.matrices[k] @ out.transmit_beams.comp_beams[k, :, 0])
        for k in range(4)
    ]
    assert max(gains) > 0
    assert max(gains) - min(gains) <= 1e-6 * max(gains)


def test_uniform_forcing_respects_budget_split():
    cfg = desk()
    _, ch = make_instance(cfg, 4)
    rx = mmse_receive_beams(initial_transmit_beams(cfg), ch, cfg.noise_power)
    tx = uniform_forcing_beams(rx, ch, cfg)
    for k in range(4):
        comp = np.linalg.norm(tx.comp_beams[k]) ** 2
        sense = np.linalg.norm(tx.sense_beams[k]) ** 2
        assert comp <= cfg.power_budget_per_ue[k] / 2.0 + 1e-9
        assert sense <= cfg.power_budget_per_ue[k] / 2.0 + 1e-9


@pytest.mark.parametrize("kind", ["fixed_mmse", "zfbf", "mfbf", "ufbf"])
@pytest.mark.parametrize("mode", ["cem", "wsr"])
def test_every_variant_is_power_feasible(kind, mode):
    cfg = desk()
    _, ch = make_instance(cfg, 5)
    out = run_baseline(BaselineVariant(kind, mode), cfg, ch, OptimizerOptions(max_iterations=15))
    assert out.trace.records
    report = out.trace.records[-1].report
    assert report.per_ue_power_slack.min() >= -1e-6 * cfg.power_budget_per_ue.max()
    assert np.isfinite(out.trace.objectives()).all()


@pytest.mark.parametrize("kind", ["fixed_mmse", "zfbf", "mfbf", "ufbf"])
def test_variants_are_deterministic(kind):
    cfg = desk()
    _, ch = make_instance(cfg, 6)
    a = run_baseline(BaselineVariant(kind), cfg, ch, OptimizerOptions(max_iterations=10))
    b = run_baseline(BaselineVariant(kind), cfg, ch, OptimizerOptions(max_iterations=10))
    assert a.transmit_beams.comp_beams.tobytes() == b.transmit_beams.comp_beams.tobytes()
    assert a.transmit_beams.sense_beams.tobytes() == b.transmit_beams.sense_beams.tobytes()
    assert a.trace.objectives() == b.trace.objectives()


def test_run_baseline_accepts_shorthand():
    cfg = desk()
    _, ch = make_instance(cfg, 0)
    out = run_baseline("fixed_mmse", cfg, ch)
    assert out.n_iterations == 1
    out2 = run_baseline(("fixed_mmse", "wsr"), cfg, ch)
    assert out2.trace.records[0].objective != out.trace.records[0].objective
