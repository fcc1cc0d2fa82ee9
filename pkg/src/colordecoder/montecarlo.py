"""Monte Carlo estimation of logical failure rates and the threshold.

Trial ``i`` of a batch draws everything it needs from its own generator,
seeded by ``(master_seed, i)``. Batches are cut into chunks whose size
depends only on the code size, so failure counts do not depend on how many
worker processes share the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import f2
from .cell import EPS
from .decoder import DecoderConfig, decode
from .lattice import LatticeHierarchy, get_level

Z95 = 1.959963984540054


@dataclass
class TrialRecord:
    m: int
    p: float
    seed: int
    weight: int
    success: bool


@dataclass
class BatchStats:
    m: int
    L: int
    n: int
    p: float
    trials: int
    failures: int
    mode: str
    bp_iters: int
    split_rounds: int
    seed: int

    @property
    def rate(self) -> float:
        return self.failures / self.trials

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)


def wilson_interval(failures: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("need at least one trial")
    phat = failures / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # the bounds are exactly 0 and 1 at the extremes; pin them against rounding
    lo = 0.0 if failures == 0 else max(0.0, center - half)
    hi = 1.0 if failures == trials else min(1.0, center + half)
    return lo, hi


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_error(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Independent flips with probability ``p`` on ``n`` bits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return (rng.random(n) < p).astype(np.uint8)


def _prior(p: float) -> float:
    # p = 0 still needs a usable prior; the error is empty anyway.
    return min(max(p, EPS), 0.5)


def run_trial(
    hierarchy: LatticeHierarchy,
    p: float,
    config: DecoderConfig = DecoderConfig(),
    rng: np.random.Generator | None = None,
    error=None,
    seed: int = 0,
) -> TrialRecord:
    """Sample (or take) an error, decode its syndrome, test the residual.

    Success means the residual lies in the stabilizer rowspace.
    """
    top = hierarchy.top
    if rng is None:
        rng = np.random.default_rng(seed)
    e = sample_error(top.n, p, rng) if error is None else np.asarray(error, dtype=np.uint8)
    s = top.syndrome_of(e)
    result = decode(hierarchy.m, s, _prior(p), config, rng)
    residual = e ^ result.estimate
    ok = f2.in_rowspace(top.check_matrix, residual)
    return TrialRecord(hierarchy.m, p, seed, int(e.sum()), bool(ok))


def chunk_size(n: int) -> int:
    return max(16, 2**16 // n)


def _run_chunk(args) -> int:
    m, p, seed, start, stop, config = args
    top = get_level(m)
    gens = [trial_rng(seed, i) for i in range(start, stop)]
    e = np.stack([sample_error(top.n, p, g) for g in gens])
    s = top.syndrome_of(e)
    rng = gens if config.split_rule == "sampled" else None
    est = decode(m, s, _prior(p), config, rng).estimate
    residual = e ^ est
    if top.syndrome_of(residual).any():
        raise RuntimeError("decoder returned an estimate with the wrong syndrome")
    return int(top.logical_class(residual).any(axis=1).sum())


def _map(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def run_batch(
    m: int,
    p: float,
    trials: int,
    seed: int,
    workers: int = 1,
    config: DecoderConfig = DecoderConfig(),
) -> BatchStats:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    top = get_level(m)
    size = chunk_size(top.n)
    jobs = [(m, p, seed, a, min(a + size, trials), config) for a in range(0, trials, size)]
    failures = sum(_map(_run_chunk, jobs, workers))
    return BatchStats(m, top.L, top.n, p, trials, failures, config.mode, config.bp_iters, config.split_rounds, seed)


def sweep(
    ms,
    ps,
    trials: int,
    seed: int,
    workers: int = 1,
    config: DecoderConfig = DecoderConfig(),
) -> list[BatchStats]:
    """Every (m, p) pair, with chunks from all points sharing one worker pool."""
    jobs, owners = [], []
    for m in ms:
        size = chunk_size(get_level(m).n)
        for p in ps:
            for a in range(0, trials, size):
                jobs.append((m, p, seed, a, min(a + size, trials), config))
                owners.append((m, p))
    counts = _map(_run_chunk, jobs, workers)
    totals: dict[tuple[int, float], int] = {}
    for key, c in zip(owners, counts):
        totals[key] = totals.get(key, 0) + c
    out = []
    for m in ms:
        lv = get_level(m)
        for p in ps:
            out.append(
                BatchStats(m, lv.L, lv.n, p, trials, totals[(m, p)], config.mode, config.bp_iters, config.split_rounds, seed)
            )
    return out


def _crossing(a: list[tuple[float, float]], b: list[tuple[float, float]]) -> float | None:
    """First crossing of two log-rate curves on their shared p values."""
    ra, rb = dict(a), dict(b)
    ps = sorted(p for p in set(ra) & set(rb) if ra[p] > 0 and rb[p] > 0)
    d = [math.log(rb[p]) - math.log(ra[p]) for p in ps]
    for i in range(len(ps)):
        if d[i] == 0 and 0 < i < len(ps) - 1 and d[i - 1] * d[i + 1] < 0:
            return ps[i]
        if i + 1 < len(ps) and d[i] * d[i + 1] < 0:
            return ps[i] + (ps[i + 1] - ps[i]) * (-d[i]) / (d[i + 1] - d[i])
    return None


def estimate_threshold(curves: dict) -> tuple[float, float, list[dict]]:
    """Mean crossing of adjacent size pairs and the largest pairwise gap.

    ``curves`` maps code size ``m`` to a sequence of ``(p, rate)`` points.
    Raises ``ValueError("no crossing")`` when some adjacent pair never crosses.
    """
    if len(curves) < 2:
        raise ValueError("need curves for at least two sizes")
    sizes = sorted(curves)
    pairs = []
    for small, large in zip(sizes, sizes[1:]):
        x = _crossing(list(curves[small]), list(curves[large]))
        if x is None:
            raise ValueError(f"no crossing between m={small} and m={large}")
        pairs.append({"m_small": small, "m_large": large, "p_cross": x})
    xs = [pr["p_cross"] for pr in pairs]
    return float(np.mean(xs)), float(max(xs) - min(xs)), pairs


def curves_from_stats(stats: list[BatchStats]) -> dict:
    curves: dict[int, list[tuple[float, float]]] = {}
    for st in stats:
        curves.setdefault(st.m, []).append((st.p, st.rate))
    return {m: sorted(v) for m, v in curves.items()}
