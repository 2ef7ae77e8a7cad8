import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdtw_readuntil import (
    Event,
    EventDetectionParams,
    FixedPointParams,
    RawRead,
    dac_to_pa,
    detect_events,
    extract_query,
    preprocess_read,
    quantize,
    zscore_normalize,
)
from sdtw_readuntil.errors import InvalidParams, NotEnoughEvents, SignalTooShort, ZeroVariance
from sdtw_readuntil.events import tstat

from oracles import tstat_scalar

P = EventDetectionParams()


def test_dac_to_pa_examples():
    r = RawRead("r", [10, 0, -5], 8192, 0, 1469.3, 4000)
    pa = dac_to_pa(r)
    assert pa[0] == pytest.approx(1.79358, abs=1e-5)
    assert pa[1] == 0.0
    assert pa.size == 3


def test_dac_to_pa_offset():
    r = RawRead("r", [100], 8192, 13, 1443.030273, 4000)
    assert dac_to_pa(r)[0] == pytest.approx(113 * 1443.030273 / 8192)


def test_tstat_matches_scalar_oracle():
    x = np.random.default_rng(0).normal(80, 5, 300)
    for w in (3, 6):
        np.testing.assert_allclose(tstat(x, w), tstat_scalar(x.tolist(), w), rtol=1e-7, atol=1e-9)


def test_constant_signal_single_event():
    x = np.full(1000, 80.0)
    assert max(tstat_scalar(x.tolist(), 3)) < P.threshold1
    assert max(tstat_scalar(x.tolist(), 6)) < P.threshold2
    ev = detect_events(x)
    assert len(ev) == 1
    assert (ev[0].start, ev[0].length, ev[0].mean) == (0, 1000, 80.0)


def test_step_signal_two_events():
    x = np.r_[np.full(500, 80.0), np.full(500, 120.0)]
    t = tstat_scalar(x.tolist(), 6)
    above = [i for i, v in enumerate(t) if v > P.threshold2]
    assert above and all(abs(i - 500) <= P.window2 for i in above)
    ev = detect_events(x)
    assert len(ev) == 2
    assert abs(ev[1].start - 500) <= P.window2
    assert ev[0].mean == 80.0 and ev[1].mean == 120.0


def test_piecewise_constant_recovered():
    rng = np.random.default_rng(1)
    levels = rng.normal(90, 12, 200)
    widths = rng.integers(6, 15, 200)
    x = np.repeat(levels, widths)
    ev = detect_events(x)
    assert [e.start for e in ev] == np.r_[0, np.cumsum(widths)[:-1]].tolist()
    np.testing.assert_allclose([e.mean for e in ev], levels)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 200), min_size=13, max_size=800))
def test_events_tile_signal(xs):
    ev = detect_events(np.array(xs))
    assert ev[0].start == 0
    assert all(a.start + a.length == b.start for a, b in zip(ev, ev[1:]))
    assert sum(e.length for e in ev) == len(xs)
    assert all(e.length >= 1 for e in ev)


def test_signal_too_short():
    with pytest.raises(SignalTooShort):
        detect_events(np.arange(12.0))


def test_params_validation():
    with pytest.raises(InvalidParams):
        EventDetectionParams(window1=6, window2=6)
    with pytest.raises(InvalidParams):
        EventDetectionParams(query_events=0)


def _events(means):
    return [Event(10 * i, 10, float(m), 1.0) for i, m in enumerate(means)]


def test_extract_query_window():
    means = np.random.default_rng(2).normal(90, 10, 400)
    fp = FixedPointParams(32)
    q = extract_query(_events(means), P, fp, "r")
    assert q.n_events == 250 and q.trimmed_prefix == 50
    np.testing.assert_array_equal(q.events_normalized, zscore_normalize(means[50:300]))
    np.testing.assert_array_equal(q.events_fixed, quantize(q.events_normalized, fp))


def test_extract_query_not_enough_events():
    with pytest.raises(NotEnoughEvents):
        extract_query(_events(np.arange(299.0)))


def test_extract_query_flat():
    with pytest.raises(ZeroVariance):
        extract_query(_events(np.full(300, 5.0)))


def test_preprocess_deterministic(model, reference):
    from sdtw_readuntil.simulate import SimParams, simulate_reads
    reads, _ = simulate_reads([reference], model, seed=2, sim=SimParams(n_reads=3, noise_sigma=0.3))
    for r in reads:
        a, b = preprocess_read(r), preprocess_read(r)
        assert a.n_events == 250
        np.testing.assert_array_equal(a.events_fixed, b.events_fixed)
