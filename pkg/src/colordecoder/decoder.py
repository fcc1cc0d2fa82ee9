"""Recursive rescaling decoder for the hexagonal color code on a torus.

Each level splits the shared mid-edge syndromes between neighbouring cells,
corrects every cell locally with the canonical estimate of its split, and
hands the leftover corner syndrome plus per-cell flip probabilities to the
half-size lattice below. The 18-qubit base code is decoded by exact
maximum likelihood over logical classes, and the coarse corrections are then
pushed back up through the complement operator of each cell.

All entry points accept a single syndrome or a batch with a leading axis.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from . import cell, f2, messaging
from .lattice import LatticeHierarchy, LatticeLevel, build_hierarchy, get_level

MODES = ("hard", "soft")
SPLIT_RULES = ("ml", "sampled")


@dataclass(frozen=True)
class DecoderConfig:
    mode: str = "soft"
    bp_iters: int = 2
    split_rounds: int = 3
    split_rule: str = "ml"
    corner_lookahead: bool = True

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.split_rule not in SPLIT_RULES:
            raise ValueError(f"split rule must be one of {SPLIT_RULES}, got {self.split_rule!r}")
        if self.bp_iters < 0 or self.split_rounds < 0:
            raise ValueError("iteration counts must be nonnegative")


@dataclass
class LevelTrace:
    level: int
    splits: np.ndarray  # (B, C, 3) chosen share of each mid-edge check
    local: np.ndarray  # (B, C) 4-bit local estimates
    coarse_syndrome: np.ndarray  # (B, K)
    coarse_priors: np.ndarray  # (B, C)


@dataclass
class DecodeResult:
    estimate: np.ndarray
    traces: list[LevelTrace]
    mode: str
    config: DecoderConfig = field(default_factory=DecoderConfig)

    def split_counts(self) -> list[dict]:
        """Number of cell shares set to 1, per level (first batch row)."""
        return [
            {"level": t.level, "ones": int(t.splits[0].sum()), "shares": int(t.splits[0].size)}
            for t in self.traces
        ]


def _rows(rngs, B: int):
    if rngs is None:
        return None
    if isinstance(rngs, np.random.Generator):
        return [rngs] if B == 1 else None
    rngs = list(rngs)
    if len(rngs) != B:
        raise ValueError(f"got {len(rngs)} generators for a batch of {B}")
    return rngs


def level_pass(
    priors,
    syndrome,
    level: LatticeLevel,
    config: DecoderConfig = DecoderConfig(),
    rng=None,
) -> LevelTrace:
    """Split, correct locally and rescale one decomposable level.

    ``priors`` is ``(B, n)`` and ``syndrome`` ``(B, L^2)``. ``rng`` supplies
    randomness for the sampled split rule: one Generator per batch row, or a
    single Generator for a batch of one.
    """
    if level.L % 2:
        raise ValueError("the base level is decoded by lookup, not by a level pass")
    lay = level.layout
    priors = np.atleast_2d(np.asarray(priors, dtype=np.float64))
    syndrome = np.atleast_2d(np.asarray(syndrome)).astype(np.uint8)
    B = priors.shape[0]

    if config.corner_lookahead:
        priors = messaging.corner_lookahead(priors, syndrome, level)
    cp = cell.clamp(priors[:, lay.qubits])
    mids = syndrome[:, lay.mid_checks]

    beliefs = messaging.enforce_consistency(messaging.init_split_beliefs(cp), mids, lay)
    rounds = config.split_rounds if config.mode == "soft" else 0
    for _ in range(rounds):
        beliefs = messaging.split_round(beliefs, cp, mids, lay)

    (c0, k0), (c1, k1) = lay.mid_sides[:, 0].T, lay.mid_sides[:, 1].T
    uniforms = None
    if config.split_rule == "sampled":
        gens = _rows(rng, B)
        if gens is None:
            raise ValueError("sampled split rule needs one Generator per batch row")
        uniforms = np.stack([g.random(len(c0)) for g in gens])
    st, sl = messaging.finalize_splits(beliefs[:, c0, k0], mids, config.split_rule, uniforms)
    splits = np.zeros((B, lay.num_cells, 3), dtype=np.uint8)
    splits[:, c0, k0] = st
    splits[:, c1, k1] = sl

    sidx = (splits[..., 0].astype(np.intp) << 2) | (splits[..., 1] << 1) | splits[..., 2]
    local = cell.CANONICAL[sidx]

    # Corner bit of e_k sits at bit (3 - k) of the local pattern.
    corner_bits = (local[:, lay.corner_cells] >> (3 - lay.corner_slots)) & 1
    coarse_syndrome = (syndrome[:, lay.corner_checks] ^ (corner_bits.sum(axis=-1) & 1)).astype(np.uint8)

    if config.mode == "soft":
        coarse_priors = cell.rescaled_soft(beliefs, cp)
    else:
        table = cell.rescaled_hard_table(cp)
        coarse_priors = np.take_along_axis(table, sidx[..., None], axis=-1)[..., 0]
    return LevelTrace(level.level, splits, local, coarse_syndrome, cell.clamp(coarse_priors))


# -- base level ---------------------------------------------------------------


@dataclass(frozen=True)
class BaseTables:
    offsets: np.ndarray  # (16, 128, 18): logical class x stabilizer element
    reps: np.ndarray  # (512, 18) one solution per syndrome
    valid: np.ndarray  # (512,) bool


def _span(vectors: list[np.ndarray], n: int) -> np.ndarray:
    out = np.zeros((2 ** len(vectors), n), dtype=np.uint8)
    for idx in range(1, len(out)):
        low = idx & -idx
        out[idx] = out[idx ^ low] ^ vectors[low.bit_length() - 1]
    return out


@lru_cache(maxsize=None)
def base_tables() -> BaseTables:
    base = get_level(0)
    H = base.check_matrix
    r, R, _ = f2.gauss_reduce(H)
    stabilizers = _span([R[i] for i in range(r)], base.n)
    logicals = _span(base.logical_basis, base.n)
    offsets = logicals[:, None, :] ^ stabilizers[None, :, :]
    nchk = base.num_checks
    reps = np.zeros((2**nchk, base.n), dtype=np.uint8)
    valid = np.zeros(2**nchk, dtype=bool)
    for s in range(2**nchk):
        bits = np.array([(s >> (nchk - 1 - i)) & 1 for i in range(nchk)], dtype=np.uint8)
        x = f2.solve(H, bits)
        if x is not None:
            reps[s], valid[s] = x, True
    return BaseTables(offsets, reps, valid)


def _syndrome_int(s: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(s.shape[-1] - 1, -1, -1)
    return (s.astype(np.intp) * weights).sum(axis=-1)


def base_class_scores(priors, syndrome) -> tuple[np.ndarray, np.ndarray]:
    """Log-probability of every logical class and of every class member.

    Returns ``(class_scores (B, 16), member_scores (B, 16, 128))`` up to an
    additive constant per row, plus raises on an invalid syndrome.
    """
    t = base_tables()
    P = cell.clamp(np.atleast_2d(np.asarray(priors, dtype=np.float64)))
    s = np.atleast_2d(np.asarray(syndrome)).astype(np.uint8)
    idx = _syndrome_int(s)
    if not t.valid[idx].all():
        bad = int(np.flatnonzero(~t.valid[idx])[0])
        raise ValueError(f"syndrome of batch row {bad} is not produced by any error pattern")
    rep = t.reps[idx].astype(np.float64)
    llr = np.log(P) - np.log1p(-P)
    weights = (1.0 - 2.0 * rep) * llr
    flat = t.offsets.reshape(-1, t.offsets.shape[-1]).astype(np.float64)
    members = (weights @ flat.T + (rep * llr).sum(axis=1, keepdims=True)).reshape(-1, 16, 128)
    top = members.max(axis=(1, 2), keepdims=True)
    classes = np.log(np.exp(members - top).sum(axis=-1)) + top[:, :, 0]
    return classes, members


def base_ml_decode(priors, syndrome) -> np.ndarray:
    """Most likely element of the most likely logical class at L=3."""
    t = base_tables()
    squeeze = np.ndim(syndrome) == 1
    s = np.atleast_2d(np.asarray(syndrome)).astype(np.uint8)
    classes, members = base_class_scores(priors, s)
    best = np.argmax(classes, axis=1)
    rows = np.arange(len(best))
    member = np.argmax(members[rows, best], axis=1)
    est = t.reps[_syndrome_int(s)] ^ t.offsets[best, member]
    return est[0] if squeeze else est


# -- expansion and driver -----------------------------------------------------

_COMPLEMENT_BITS = np.array(cell.pattern_bits(cell.COMPLEMENT), dtype=np.uint8)
_PATTERN_BITS = np.array([cell.pattern_bits(e) for e in range(16)], dtype=np.uint8)


def expand_level(local, coarse_estimate, level: LatticeLevel) -> np.ndarray:
    """Physical estimate at ``level`` from local patterns and coarse flips."""
    lay = level.layout
    local = np.atleast_2d(local)
    coarse = np.atleast_2d(np.asarray(coarse_estimate)).astype(np.uint8)
    bits = _PATTERN_BITS[local] ^ (coarse[:, :, None] * _COMPLEMENT_BITS)
    out = np.zeros((local.shape[0], level.n), dtype=np.uint8)
    out[:, lay.qubits] = bits
    return out


def expand_downward(traces: list[LevelTrace], base_estimate, hierarchy: LatticeHierarchy) -> np.ndarray:
    """Walk from the base estimate back up to the physical lattice."""
    est = np.atleast_2d(base_estimate)
    for trace in sorted(traces, key=lambda t: t.level):
        est = expand_level(trace.local, est, hierarchy[trace.level])
    return est


def decode(m: int, syndrome, p: float, config: DecoderConfig = DecoderConfig(), rng=None) -> DecodeResult:
    """Decode a syndrome (or a batch of them) on the level-``m`` lattice.

    ``p`` is the channel flip probability used as the uniform prior.
    """
    if not 0.0 < p <= 0.5:
        raise ValueError(f"channel probability must lie in (0, 0.5], got {p}")
    hierarchy = build_hierarchy(m)
    top = hierarchy.top
    squeeze = np.ndim(syndrome) == 1
    s = np.atleast_2d(np.asarray(syndrome)).astype(np.uint8)
    if s.shape[1] != top.num_checks:
        raise ValueError(f"syndrome has length {s.shape[1]}, expected {top.num_checks}")
    B = s.shape[0]
    gens = _rows(rng, B) if rng is not None else None

    priors = np.full((B, top.n), float(p))
    # The base lookup is already exact; BP posteriors would count the syndrome twice.
    if config.bp_iters and m > 0:
        priors = messaging.bp_update(priors, top, s, config.bp_iters)

    traces = []
    for lv in range(m, 0, -1):
        trace = level_pass(priors, s, hierarchy[lv], config, gens)
        traces.append(trace)
        priors, s = trace.coarse_priors, trace.coarse_syndrome
    base = base_ml_decode(priors, s)
    est = expand_downward(traces, base, hierarchy)
    return DecodeResult(est[0] if squeeze else est, traces, config.mode, config)


def config_dict(config: DecoderConfig) -> dict:
    return asdict(config)
