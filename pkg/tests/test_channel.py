import io

import numpy as np
import pytest

from smotfs import (
    ConfigurationError,
    DimensionError,
    FrameConfig,
    PathSet,
    apply_channel,
    build_link_matrix,
    build_link_matrix_direct,
    build_mimo_matrix,
    dump_channel,
    equivalent_matrix,
    load_path_set,
    sample_paths,
    symbol_snr,
)

CFG = FrameConfig(m=2, n=2, n_t=2, n_r=2, q=4, p=2)


def unit_paths(cfg, delays, dopplers, gain=1.0):
    p = len(delays)
    gains = np.full((p, cfg.n_r, cfg.n_t), gain, dtype=np.complex128)
    return PathSet(
        delays=np.asarray(delays, dtype=np.int64),
        dopplers=np.asarray(dopplers, dtype=np.int64),
        gains=gains,
    )


def test_sample_ranges():
    cfg = FrameConfig(m=8, n=4, n_t=2, n_r=2, q=4, p=4)
    rng = np.random.default_rng(0)
    for _ in range(200):
        paths = sample_paths(cfg, rng)
        assert paths.delays.min() >= 0 and paths.delays.max() <= 7
        assert paths.dopplers.min() >= -3 and paths.dopplers.max() <= 3
        assert paths.gains.shape == (4, 2, 2)


def test_single_path_unit_variance():
    cfg = FrameConfig(m=4, n=2, n_t=1, n_r=1, q=4, p=1)
    rng = np.random.default_rng(1)
    draws = np.array([sample_paths(cfg, rng).gains[0, 0, 0] for _ in range(20000)])
    var = np.mean(np.abs(draws) ** 2)
    # variance of |h|^2 for CN(0,1) is 1 -> 3 standard errors
    assert abs(var - 1.0) <= 3.0 / np.sqrt(draws.size)


def test_gain_variance_matches_path_count():
    cfg = FrameConfig(m=4, n=2, n_t=2, n_r=2, q=4, p=4)
    rng = np.random.default_rng(2)
    n_draws = 100_000 // (cfg.p * cfg.n_r * cfg.n_t)
    draws = np.concatenate(
        [sample_paths(cfg, rng).gains.ravel() for _ in range(n_draws)]
    )
    var = np.mean(np.abs(draws) ** 2)
    se = np.sqrt(np.var(np.abs(draws) ** 2) / draws.size)
    assert abs(var - 1.0 / cfg.p) <= 3 * se


def test_zero_shift_unit_gain_is_identity():
    paths = unit_paths(CFG, [0], [0])
    h = build_link_matrix(paths, 0, 0, CFG)
    assert np.allclose(h, np.eye(CFG.m_d), atol=1e-15)


def test_single_delay_shift_swaps_blocks():
    # l=1, k=0 on a 2x2 grid: outer delay-block swap, inner identity
    paths = unit_paths(CFG, [1], [0])
    h = build_link_matrix(paths, 0, 0, CFG)
    expected = np.kron(np.array([[0.0, 1.0], [1.0, 0.0]]), np.eye(2))
    assert np.allclose(h, expected, atol=1e-15)


def test_negative_doppler_wraps_shift_but_not_phase():
    paths = unit_paths(CFG, [1], [-1])
    h = build_link_matrix(paths, 0, 0, CFG)
    # phase keeps the signed product: exp(-j*2*pi*(1*-1)/4) = +j
    phase = np.exp(-2j * np.pi * (1 * -1) / CFG.m_d)
    inner = np.roll(np.eye(2), -1 % 2, axis=0) * phase
    expected = np.kron(np.roll(np.eye(2), 1, axis=0), inner)
    assert np.allclose(h, expected, atol=1e-15)


@pytest.mark.parametrize("m,n", [(2, 2), (4, 8), (3, 4)])
def test_kronecker_matches_index_arithmetic(m, n):
    cfg = FrameConfig(m=m, n=n, n_t=2, n_r=2, q=4, p=4)
    rng = np.random.default_rng(42)
    for _ in range(100):
        paths = sample_paths(cfg, rng)
        for n_r in range(cfg.n_r):
            for n_t in range(cfg.n_t):
                a = build_link_matrix(paths, n_r, n_t, cfg)
                b = build_link_matrix_direct(paths, n_r, n_t, cfg)
                assert np.abs(a - b).max() <= 1e-12


def test_row_sparsity_bound():
    cfg = FrameConfig(m=4, n=4, n_t=1, n_r=1, q=4, p=3)
    rng = np.random.default_rng(9)
    for _ in range(50):
        paths = sample_paths(cfg, rng)
        h = build_link_matrix(paths, 0, 0, cfg)
        nonzeros = (np.abs(h) > 0).sum(axis=1)
        assert nonzeros.max() <= cfg.p
        keys = {(int(l), int(k) % cfg.n) for l, k in zip(paths.delays, paths.dopplers)}
        if len(keys) == cfg.p:
            assert np.all(nonzeros == cfg.p)


def test_entry_moduli_with_unit_gains():
    cfg = FrameConfig(m=4, n=4, n_t=1, n_r=1, q=4, p=2)
    paths = unit_paths(cfg, [0, 1], [2, -1])
    h = build_link_matrix(paths, 0, 0, cfg)
    mods = np.abs(h[np.abs(h) > 0])
    assert np.allclose(mods, 1.0, atol=1e-12)   # distinct shifts never collide


def test_link_energy_expectation():
    cfg = FrameConfig(m=2, n=2, n_t=1, n_r=1, q=4, p=3)
    rng = np.random.default_rng(17)
    vals = []
    for _ in range(10_000):
        paths = sample_paths(cfg, rng)
        h = build_link_matrix(paths, 0, 0, cfg)
        vals.append(np.linalg.norm(h) ** 2)
    vals = np.asarray(vals)
    se = np.sqrt(np.var(vals) / vals.size)
    assert abs(vals.mean() - cfg.m_d) <= 3 * se


def test_mimo_block_layout():
    rng = np.random.default_rng(3)
    paths = sample_paths(CFG, rng)
    h = build_mimo_matrix(paths, CFG)
    for n_r in range(CFG.n_r):
        for n_t in range(CFG.n_t):
            block = h[
                n_r * CFG.m_d : (n_r + 1) * CFG.m_d,
                n_t * CFG.m_d : (n_t + 1) * CFG.m_d,
            ]
            assert np.array_equal(block, build_link_matrix(paths, n_r, n_t, CFG))


def test_zero_gains_give_zero_matrix():
    paths = unit_paths(CFG, [0, 1], [0, 1], gain=0.0)
    assert not build_mimo_matrix(paths, CFG).any()


def test_mimo_accumulates_per_receive_antenna():
    rng = np.random.default_rng(4)
    paths = sample_paths(CFG, rng)
    h = build_mimo_matrix(paths, CFG)
    x = rng.standard_normal(CFG.n_s) + 1j * rng.standard_normal(CFG.n_s)
    y = h @ x
    for n_r in range(CFG.n_r):
        acc = np.zeros(CFG.m_d, dtype=complex)
        for n_t in range(CFG.n_t):
            acc += build_link_matrix(paths, n_r, n_t, CFG) @ x[
                n_t * CFG.m_d : (n_t + 1) * CFG.m_d
            ]
        assert np.abs(y[n_r * CFG.m_d : (n_r + 1) * CFG.m_d] - acc).max() <= 1e-12


def test_equivalent_matrix_is_identity_permutation_for_single_antenna():
    cfg = FrameConfig(m=2, n=2, n_t=1, n_r=2, q=4, p=2)
    rng = np.random.default_rng(5)
    h = build_mimo_matrix(sample_paths(cfg, rng), cfg)
    assert np.array_equal(equivalent_matrix(h, cfg), h)


def test_equivalent_matrix_against_dense_product():
    from smotfs import shuffle_index

    rng = np.random.default_rng(6)
    h = build_mimo_matrix(sample_paths(CFG, rng), CFG)
    u = np.zeros((CFG.n_s, CFG.n_s))
    for n_t in range(CFG.n_t):
        for m_d in range(CFG.m_d):
            u[shuffle_index(n_t, m_d, CFG), m_d * CFG.n_t + n_t] = 1.0
    assert np.abs(equivalent_matrix(h, CFG) - h @ u).max() == 0.0


def test_apply_channel_noiseless_and_moments():
    rng = np.random.default_rng(7)
    c = build_mimo_matrix(sample_paths(CFG, rng), CFG)
    s = rng.standard_normal(CFG.n_s) + 1j * rng.standard_normal(CFG.n_s)
    assert np.array_equal(apply_channel(c, s, 0.0, rng), c @ s)

    sigma2 = 0.3
    draws = np.concatenate(
        [apply_channel(c, np.zeros(CFG.n_s), sigma2, rng) for _ in range(12_500)]
    )
    power = np.abs(draws) ** 2
    se = np.sqrt(np.var(power) / power.size)
    assert abs(power.mean() - sigma2) <= 3 * se
    assert symbol_snr(CFG, 0.5) == pytest.approx(1.0)    # 0 dB at n_t=2


def test_apply_channel_rejects_negative_variance():
    with pytest.raises(ConfigurationError):
        apply_channel(np.eye(2), np.zeros(2), -1.0, 0)


def test_path_validation():
    bad = unit_paths(CFG, [5], [0])      # delay beyond m-1
    with pytest.raises(DimensionError):
        build_link_matrix(bad, 0, 0, CFG)
    with pytest.raises(DimensionError):
        build_link_matrix(unit_paths(CFG, [0], [0]), 2, 0, CFG)


def test_dump_round_trip():
    rng = np.random.default_rng(8)
    paths = sample_paths(CFG, rng)
    buf = io.StringIO()
    dump_channel(paths, CFG, 8, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "2 2 2 2 2 8"
    loaded, header = load_path_set(text)
    assert header == {"m": 2, "n": 2, "n_t": 2, "n_r": 2, "p": 2, "seed": 8}
    assert np.array_equal(loaded.delays, paths.delays)
    assert np.array_equal(loaded.dopplers, paths.dopplers)
    assert np.array_equal(loaded.gains, paths.gains)
