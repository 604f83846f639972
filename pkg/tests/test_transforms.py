import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smotfs import DimensionError, isfft, sfft
from oracles import isfft_direct, sfft_direct

SHAPES = [(2, 2), (4, 8), (3, 5), (1, 4), (4, 1)]


def _random_grid(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_delta_maps_to_constant_grid():
    n, m = 4, 8
    x = np.zeros((n, m), dtype=complex)
    x[0, 0] = 1.0
    out = isfft(x)
    assert np.allclose(out, 1.0 / np.sqrt(n * m), atol=1e-12)
    # and back
    assert np.allclose(sfft(out), x, atol=1e-12)


@pytest.mark.parametrize("shape", SHAPES)
def test_round_trip_and_unitarity(shape):
    rng = np.random.default_rng(11)
    for _ in range(20):
        x = _random_grid(rng, shape)
        assert np.abs(sfft(isfft(x)) - x).max() <= 1e-12
        assert np.abs(isfft(sfft(x)) - x).max() <= 1e-12
        assert abs(np.linalg.norm(isfft(x)) - np.linalg.norm(x)) <= 1e-12


def test_matches_double_sum_oracle_2x2():
    rng = np.random.default_rng(5)
    x = _random_grid(rng, (2, 2))
    assert np.abs(isfft(x) - isfft_direct(x)).max() <= 1e-12
    assert np.abs(sfft(x) - sfft_direct(x)).max() <= 1e-12


@pytest.mark.parametrize("shape", [(4, 8), (3, 5)])
def test_matches_double_sum_oracle_larger(shape):
    rng = np.random.default_rng(6)
    x = _random_grid(rng, shape)
    assert np.abs(isfft(x) - isfft_direct(x)).max() <= 1e-12
    assert np.abs(sfft(x) - sfft_direct(x)).max() <= 1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.sampled_from(SHAPES),
)
def test_energy_preserved_property(seed, shape):
    x = _random_grid(np.random.default_rng(seed), shape)
    assert abs(np.linalg.norm(isfft(x)) - np.linalg.norm(x)) <= 1e-12


def test_rejects_non_grids():
    with pytest.raises(DimensionError):
        isfft(np.zeros(4, dtype=complex))
    with pytest.raises(DimensionError):
        sfft(np.zeros((2, 2, 2), dtype=complex))
