import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smotfs import ConfigurationError, FrameConfig, enumerate_taps_best_first
from smotfs.errors import DimensionError
from oracles import exhaustive_tap_order

CFG_2 = FrameConfig(m=3, n=1, n_t=2, n_r=1, q=4, p=1)       # 8 patterns
CFG_6 = FrameConfig(m=3, n=2, n_t=2, n_r=1, q=4, p=1)       # 64 patterns
CFG_44 = FrameConfig(m=2, n=2, n_t=4, n_r=1, q=4, p=1)      # 256 patterns


def test_depth_one_takes_per_bin_minima():
    rng = np.random.default_rng(0)
    d = rng.random(CFG_6.n_s)
    (tap,) = enumerate_taps_best_first(d, CFG_6, 1)
    per_bin = d.reshape(CFG_6.m_d, CFG_6.n_t)
    expected = per_bin.argmin(axis=1)
    assert np.array_equal(tap.antenna_indices(CFG_6), expected)
    assert tap.reliability == pytest.approx(per_bin.min(axis=1).sum())


@pytest.mark.parametrize("cfg", [CFG_2, CFG_6, CFG_44])
def test_full_enumeration_is_sorted(cfg):
    rng = np.random.default_rng(1)
    d = rng.random(cfg.n_s)
    taps = enumerate_taps_best_first(d, cfg, cfg.tap_count)
    assert len(taps) == cfg.tap_count
    lams = [t.reliability for t in taps]
    assert all(a <= b for a, b in zip(lams, lams[1:]))
    assert len({t.positions for t in taps}) == cfg.tap_count


@pytest.mark.parametrize("cfg,n_vectors", [(CFG_2, 400), (CFG_6, 400), (CFG_44, 200)])
def test_prefix_matches_exhaustive_sort_every_depth(cfg, n_vectors):
    rng = np.random.default_rng(2)
    for _ in range(n_vectors):
        d = rng.random(cfg.n_s)
        full = exhaustive_tap_order(d, cfg)
        streamed = enumerate_taps_best_first(d, cfg, cfg.tap_count)
        for got, want in zip(streamed, full):
            assert got.positions == want.positions
            assert got.reliability == want.reliability


def test_prefix_property_under_ties():
    # heavily tied distance vectors exercise the lexicographic tie-break
    rng = np.random.default_rng(3)
    for _ in range(200):
        d = rng.integers(0, 3, size=CFG_6.n_s).astype(float)
        full = exhaustive_tap_order(d, CFG_6)
        for t_d in (1, 7, 31, 64):
            got = enumerate_taps_best_first(d, CFG_6, t_d)
            assert [t.positions for t in got] == [t.positions for t in full[:t_d]]


@settings(max_examples=150, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.integers(min_value=1, max_value=64),
)
def test_prefix_property_hypothesis(seed, t_d):
    d = np.random.default_rng(seed).random(CFG_6.n_s)
    got = enumerate_taps_best_first(d, CFG_6, t_d)
    want = exhaustive_tap_order(d, CFG_6)[:t_d]
    assert [t.positions for t in got] == [t.positions for t in want]


def test_depth_validation():
    d = np.zeros(CFG_2.n_s)
    with pytest.raises(ConfigurationError):
        enumerate_taps_best_first(d, CFG_2, 0)
    with pytest.raises(ConfigurationError):
        enumerate_taps_best_first(d, CFG_2, CFG_2.tap_count + 1)
    with pytest.raises(DimensionError):
        enumerate_taps_best_first(np.zeros(3), CFG_2, 1)
