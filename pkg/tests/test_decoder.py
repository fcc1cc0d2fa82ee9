import numpy as np
import pytest

from colordecoder import cell, f2
from colordecoder.decoder import (
    DecoderConfig,
    base_ml_decode,
    base_tables,
    decode,
    expand_downward,
    expand_level,
    level_pass,
)
from colordecoder.lattice import build_hierarchy, get_level
from oracles import brute_force_classes

HARD_PLAIN = DecoderConfig(mode="hard", bp_iters=0, corner_lookahead=False)


@pytest.fixture(scope="module")
def base_oracle():
    base = get_level(0)
    K = np.array(f2.kernel_basis(base.check_matrix))
    return base, K


def _label(K, e):
    bits = (K.astype(np.int64) @ np.asarray(e, dtype=np.int64).T) % 2
    return (bits.T * (1 << np.arange(K.shape[0] - 1, -1, -1))).sum(axis=-1)


def _all_syndromes(nchk):
    idx = np.arange(2**nchk)
    return ((idx[:, None] >> np.arange(nchk - 1, -1, -1)) & 1).astype(np.uint8)


def _assert_ml_class(rows, labels):
    """Chosen class attains the maximum; where the maximum is unique it is that class."""
    idx = np.arange(len(rows))
    np.testing.assert_allclose(rows[idx, labels], rows.max(axis=1), rtol=1e-9)
    ordered = np.sort(rows, axis=1)
    unique = ordered[:, -1] > ordered[:, -2] * (1 + 1e-9)
    assert (labels[unique] == rows[unique].argmax(axis=1)).all()


def test_config_validation():
    with pytest.raises(ValueError):
        DecoderConfig(mode="fuzzy")
    with pytest.raises(ValueError):
        DecoderConfig(split_rule="coin")
    with pytest.raises(ValueError):
        DecoderConfig(bp_iters=-1)


def test_level_pass_zero_syndrome():
    lv = get_level(1)
    t = level_pass(np.full(lv.n, 0.1), np.zeros(lv.num_checks, dtype=np.uint8), lv, HARD_PLAIN)
    assert not t.splits.any() and not t.local.any() and not t.coarse_syndrome.any()
    np.testing.assert_allclose(t.coarse_priors, 0.0013698630136986304, rtol=1e-12)


def test_level_pass_center_error_stays_local():
    lv = get_level(1)
    e = np.zeros(lv.n, dtype=np.uint8)
    e[lv.cells[0].qubits[3]] = 1
    t = level_pass(np.full(lv.n, 0.1), lv.syndrome_of(e), lv, DecoderConfig())
    assert t.local[0, 0] == 0b0001
    assert not t.local[0, 1:].any()
    assert not t.coarse_syndrome.any()


@pytest.mark.parametrize("slot", [0, 1, 2])
def test_level_pass_corner_error_moves_to_coarse_qubit(slot):
    h = build_hierarchy(1)
    lv = h[1]
    e = np.zeros(lv.n, dtype=np.uint8)
    e[lv.cells[0].qubits[slot]] = 1
    t = level_pass(np.full(lv.n, 0.1), lv.syndrome_of(e), lv, DecoderConfig())
    # the local pattern differs from the true one by the complement
    assert t.local[0, 0] ^ cell.COMPLEMENT == 1 << (3 - slot)
    coarse = np.zeros(h[0].n, dtype=np.uint8)
    coarse[0] = 1
    assert (t.coarse_syndrome[0] == h[0].syndrome_of(coarse)).all()
    assert t.coarse_priors[0, 0] > 0.5


def test_level_pass_rejects_base():
    with pytest.raises(ValueError):
        level_pass(np.full(18, 0.1), np.zeros(9), get_level(0))


def test_level_pass_coarse_syndrome_is_consistent():
    h = build_hierarchy(2)
    rng = np.random.default_rng(2)
    e = (rng.random((50, h.top.n)) < 0.1).astype(np.uint8)
    t = level_pass(np.full(e.shape, 0.1), h.top.syndrome_of(e), h.top, DecoderConfig())
    # local corrections plus any coarse correction with that syndrome fix the fine syndrome
    residual = e ^ expand_level(t.local, np.zeros((50, h[1].n), dtype=np.uint8), h.top)
    coarse_fix = np.stack([f2.solve(h[1].check_matrix, s) for s in t.coarse_syndrome])
    residual ^= expand_level(np.zeros_like(t.local), coarse_fix, h.top)
    assert not h.top.syndrome_of(residual).any()


def test_base_tables_shape():
    t = base_tables()
    assert t.offsets.shape == (16, 128, 18)
    assert t.valid.sum() == 128
    assert len({row.tobytes() for row in t.offsets.reshape(-1, 18)}) == 2048


def test_base_ml_matches_brute_force_uniform(base_oracle):
    base, K = base_oracle
    table = brute_force_classes(base.check_matrix, K, np.full(18, 0.05))
    synd = _all_syndromes(9)
    valid = table.sum(axis=1) > 0
    assert valid.sum() == 128
    est = base_ml_decode(np.full((valid.sum(), 18), 0.05), synd[valid])
    assert (base.syndrome_of(est) == synd[valid]).all()
    _assert_ml_class(table[valid], _label(K, est))


def test_base_ml_matches_brute_force_random_priors(base_oracle):
    base, K = base_oracle
    rng = np.random.default_rng(5)
    synd = _all_syndromes(9)
    for _ in range(3):
        pri = rng.uniform(0.01, 0.3, 18)
        table = brute_force_classes(base.check_matrix, K, pri)
        valid = table.sum(axis=1) > 0
        est = base_ml_decode(np.tile(pri, (valid.sum(), 1)), synd[valid])
        _assert_ml_class(table[valid], _label(K, est))


def test_base_ml_rejects_impossible_syndrome():
    synd = _all_syndromes(9)
    t = base_tables()
    bad = synd[~t.valid][0]
    with pytest.raises(ValueError):
        base_ml_decode(np.full(18, 0.1), bad)


def test_expand_level_examples():
    lv = get_level(1)
    local = np.zeros(lv.layout.num_cells, dtype=np.intp)
    local[0] = 0b0001
    coarse = np.zeros(lv.layout.num_cells, dtype=np.uint8)
    coarse[1] = 1
    out = expand_level(local, coarse, lv)[0]
    c0, c1 = lv.cells[0].qubits, lv.cells[1].qubits
    assert out[list(c0)].tolist() == [0, 0, 0, 1]
    assert out[list(c1)].tolist() == [1, 1, 1, 0]
    assert out.sum() == 4


def test_expand_downward_zero():
    h = build_hierarchy(2)
    r = decode(2, np.zeros(h.top.num_checks, dtype=np.uint8), 0.05)
    assert not r.estimate.any()
    assert not expand_downward(r.traces, np.zeros(18, dtype=np.uint8), h).any()


def test_decode_m0_is_base_ml():
    base = get_level(0)
    rng = np.random.default_rng(9)
    e = (rng.random((40, 18)) < 0.1).astype(np.uint8)
    s = base.syndrome_of(e)
    r = decode(0, s, 0.1, DecoderConfig())
    assert (r.estimate == base_ml_decode(np.full((40, 18), 0.1), s)).all()


@pytest.mark.parametrize(
    "config",
    [DecoderConfig(), DecoderConfig(mode="hard"), DecoderConfig(bp_iters=0), DecoderConfig(corner_lookahead=False)],
)
def test_all_single_errors_corrected(config):
    lv = get_level(1)
    e = np.eye(lv.n, dtype=np.uint8)
    r = decode(1, lv.syndrome_of(e), 0.05, config)
    residual = e ^ r.estimate
    assert not lv.syndrome_of(residual).any()
    assert not lv.logical_class(residual).any()


def test_decode_estimate_matches_syndrome():
    lv = get_level(2)
    rng = np.random.default_rng(1)
    e = (rng.random((64, lv.n)) < 0.12).astype(np.uint8)
    s = lv.syndrome_of(e)
    est = decode(2, s, 0.12).estimate
    assert (lv.syndrome_of(est) == s).all()


def test_decode_is_deterministic():
    lv = get_level(2)
    rng = np.random.default_rng(3)
    s = lv.syndrome_of((rng.random((8, lv.n)) < 0.08).astype(np.uint8))
    a = decode(2, s, 0.08).estimate
    b = decode(2, s, 0.08).estimate
    assert (a == b).all()
    cfg = DecoderConfig(split_rule="sampled")
    gens = lambda: [np.random.default_rng(i) for i in range(8)]  # noqa: E731
    assert (decode(2, s, 0.08, cfg, gens()).estimate == decode(2, s, 0.08, cfg, gens()).estimate).all()


def test_decode_argument_checks():
    with pytest.raises(ValueError):
        decode(1, np.zeros(36, dtype=np.uint8), 0.0)
    with pytest.raises(ValueError):
        decode(1, np.zeros(35, dtype=np.uint8), 0.1)
    with pytest.raises(ValueError):
        decode(1, np.zeros((2, 36), dtype=np.uint8), 0.1, DecoderConfig(split_rule="sampled"))
