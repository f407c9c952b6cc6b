import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glsbi.dynamics import SimConfig, simulate, simulate_summaries
from glsbi.errors import DegenerateIsi, InsufficientSpikes, ParameterError
from glsbi.graph import GraphParams, generate_er
from glsbi.rng import seed_from_u64
from glsbi.stats import (
    EXCL_DEGENERATE,
    EXCL_INSUFFICIENT,
    IsiSample,
    StatisticKind,
    compute_statistic,
    extract_isis,
    gamma_moments,
    spike_frequency,
    statistics_from_summaries,
)


def test_spike_frequency_basic():
    assert spike_frequency(np.array([10, 30, 77]), 100) == 0.03
    assert spike_frequency(np.array([]), 1000) == 0.0
    assert spike_frequency(np.arange(1, 51), 50) == 1.0


def test_spike_frequency_validation():
    with pytest.raises(ParameterError):
        spike_frequency(np.array([1]), 0)
    with pytest.raises(ParameterError):
        spike_frequency(np.array([0, 5]), 10)
    with pytest.raises(ParameterError):
        spike_frequency(np.array([5, 20]), 10)


def test_extract_isis():
    assert list(extract_isis(np.array([10, 20, 40])).intervals) == [10, 20]
    assert len(extract_isis(np.array([5])).intervals) == 0
    assert list(extract_isis(np.array([1, 2, 3, 4])).intervals) == [1, 1, 1]
    with pytest.raises(ParameterError):
        extract_isis(np.array([5, 5]))


def test_isi_sample_validation():
    with pytest.raises(ParameterError):
        IsiSample(np.array([3, 0]))


def test_gamma_moments_hand_values():
    gm = gamma_moments(IsiSample(np.array([10, 20])))
    assert gm.alpha == pytest.approx(4.5, rel=1e-15)
    assert gm.beta == pytest.approx(0.3, rel=1e-15)
    gm = gamma_moments(IsiSample(np.array([1, 2, 3])))
    assert gm.alpha == pytest.approx(4.0, rel=1e-15)
    assert gm.beta == pytest.approx(2.0, rel=1e-15)


def test_gamma_moments_errors():
    with pytest.raises(DegenerateIsi):
        gamma_moments(IsiSample(np.array([7, 7, 7])))
    with pytest.raises(InsufficientSpikes):
        gamma_moments(IsiSample(np.array([7])))
    with pytest.raises(InsufficientSpikes):
        gamma_moments(IsiSample(np.array([], dtype=np.int64)))


def test_compute_statistic_dispatch():
    spikes = np.array([10, 20, 40])
    assert compute_statistic(StatisticKind.SPIKE_FREQ, spikes, 100) == 0.03
    assert compute_statistic(StatisticKind.GAMMA_ALPHA, spikes, 100) == pytest.approx(4.5)
    with pytest.raises(InsufficientSpikes):
        compute_statistic(StatisticKind.GAMMA_ALPHA, np.array([9]), 100)


def test_kind_labels():
    assert StatisticKind.from_label("spikefreq") is StatisticKind.SPIKE_FREQ
    assert StatisticKind.from_label("alpha") is StatisticKind.GAMMA_ALPHA
    with pytest.raises(ParameterError):
        StatisticKind.from_label("rate")


intervals_strategy = st.lists(
    st.integers(min_value=1, max_value=500), min_size=2, max_size=40
).filter(lambda iv: len(set(iv)) > 1)


@given(intervals_strategy)
@settings(max_examples=150, deadline=None)
def test_alpha_over_beta_is_the_mean(iv):
    gm = gamma_moments(IsiSample(np.array(iv)))
    mean = np.mean(iv)
    assert abs(gm.alpha / gm.beta - mean) <= 1e-12 * mean


@given(intervals_strategy, st.integers(min_value=2, max_value=9))
@settings(max_examples=150, deadline=None)
def test_interval_scaling_moves_beta_only(iv, c):
    base = gamma_moments(IsiSample(np.array(iv)))
    scaled = gamma_moments(IsiSample(np.array(iv) * c))
    assert abs(scaled.alpha - base.alpha) <= 1e-12 * base.alpha
    assert abs(scaled.beta - base.beta / c) <= 1e-12 * base.beta / c


def test_summary_path_matches_per_train_path_exactly():
    st0 = seed_from_u64(21)
    g, st0 = generate_er(GraphParams(60, 0.15, 0.01), st0)
    cfg = SimConfig(T=4000)
    rec, _ = simulate(g, cfg, st0)
    summ, _ = simulate_summaries(g, cfg, st0)
    for kind in StatisticKind:
        values, valid, reasons = statistics_from_summaries(kind, summ)
        for i in range(g.n):
            times = rec.spike_times(i)
            try:
                direct = compute_statistic(kind, times, cfg.T)
            except InsufficientSpikes:
                assert not valid[i] and reasons[i] == EXCL_INSUFFICIENT
                continue
            except DegenerateIsi:
                assert not valid[i] and reasons[i] == EXCL_DEGENERATE
                continue
            assert valid[i]
            assert values[i] == direct  # bit-identical by construction


def test_summary_exclusion_reasons():
    from glsbi.dynamics import TrainSummaries

    summ = TrainSummaries(
        spike_count=np.array([5, 2, 1]),
        isi_count=np.array([4, 1, 0]),
        isi_sum=np.array([40, 7, 0]),
        isi_sumsq=np.array([400, 49, 0]),  # first row constant intervals
        T=100,
    )
    values, valid, reasons = statistics_from_summaries(StatisticKind.GAMMA_ALPHA, summ)
    assert not valid.any()
    assert reasons == [EXCL_DEGENERATE, EXCL_INSUFFICIENT, EXCL_INSUFFICIENT]
    freq_values, freq_valid, _ = statistics_from_summaries(StatisticKind.SPIKE_FREQ, summ)
    assert freq_valid.all()
    assert list(freq_values) == [0.05, 0.02, 0.01]
