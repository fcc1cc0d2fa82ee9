"""Exact probability kernels for the four-qubit triangular cell.

Patterns are 4-bit integers written ``e0 e1 e2 e3`` (``e0`` is the most
significant bit) and split syndromes are 3-bit integers ``s0 s1 s2``.
Every function broadcasts over leading axes of ``priors`` / ``beliefs``.
"""

from __future__ import annotations

import numpy as np

EPS = 1e-9

#: In-cell support of mid-edge check ``k`` (s0, s1, s2).
CHECK_SUPPORTS = (0b1101, 0b1011, 0b0111)
#: Flips all three corner checks and no mid-edge check.
COMPLEMENT = 0b1110


def clamp(p):
    return np.clip(p, EPS, 1.0 - EPS)


def syndrome_bits(s: int) -> tuple[int, int, int]:
    return (s >> 2) & 1, (s >> 1) & 1, s & 1


def pattern_bits(e: int) -> tuple[int, int, int, int]:
    return (e >> 3) & 1, (e >> 2) & 1, (e >> 1) & 1, e & 1


def in_cell_syndrome(e: int) -> int:
    """Mid-edge syndrome ``s0 s1 s2`` produced by pattern ``e`` inside the cell."""
    s = 0
    for k, mask in enumerate(CHECK_SUPPORTS):
        s |= (bin(e & mask).count("1") & 1) << (2 - k)
    return s


def canonical_estimate(s: int) -> int:
    """XOR of the check supports selected by ``s``."""
    e = 0
    for k, bit in enumerate(syndrome_bits(s)):
        if bit:
            e ^= CHECK_SUPPORTS[k]
    return e


CANONICAL = np.array([canonical_estimate(s) for s in range(8)], dtype=np.intp)


def _outer_bits(p: np.ndarray) -> np.ndarray:
    """Joint law of independent bits, first bit most significant."""
    out = np.ones(p.shape[:-1] + (1,))
    for k in range(p.shape[-1]):
        pk = p[..., k, None]
        out = np.stack([out * (1.0 - pk), out * pk], axis=-1).reshape(out.shape[:-1] + (-1,))
    return out


def pattern_probs(priors) -> np.ndarray:
    """Probability of each of the 16 patterns, shape ``(..., 16)``."""
    return _outer_bits(clamp(np.asarray(priors, dtype=np.float64)))


def split_likelihoods(priors) -> np.ndarray:
    """``P(s)`` for all eight split syndromes, shape ``(..., 8)``."""
    pp = pattern_probs(priors)
    return pp[..., CANONICAL] + pp[..., CANONICAL ^ COMPLEMENT]


def split_likelihood(s: int, priors):
    """Total probability of the two patterns consistent with ``s``."""
    return split_likelihoods(priors)[..., s]


def rescaled_hard_table(priors) -> np.ndarray:
    """Flip probability of the rescaled qubit for every split, ``(..., 8)``."""
    pp = pattern_probs(priors)
    direct = pp[..., CANONICAL]
    flipped = pp[..., CANONICAL ^ COMPLEMENT]
    return flipped / (direct + flipped)


def rescaled_hard(s: int, priors):
    """Probability that the canonical estimate for ``s`` is off by the complement."""
    return rescaled_hard_table(priors)[..., s]


def split_distribution(beliefs) -> np.ndarray:
    """Product distribution over the 8 splits from per-edge beliefs, ``(..., 8)``."""
    return _outer_bits(clamp(np.asarray(beliefs, dtype=np.float64)))


def rescaled_soft(beliefs, priors, reference: int | None = None):
    """Flip probability of the rescaled qubit averaged over uncertain splits.

    With ``reference`` given, each alternative split ``s`` is evaluated by
    taking the reference's canonical estimate and applying the in-cell
    stabilizer supports of the checks where ``s`` and the reference differ.
    """
    weights = split_distribution(beliefs)
    if reference is None:
        return np.sum(rescaled_hard_table(priors) * weights, axis=-1)
    pp = pattern_probs(priors)
    base = canonical_estimate(reference)
    total = 0.0
    for s in range(8):
        diff = s ^ reference
        e_d = 0
        for k, bit in enumerate(syndrome_bits(diff)):
            if bit:
                e_d ^= CHECK_SUPPORTS[k]
        good = base ^ e_d
        flip = pp[..., good ^ COMPLEMENT]
        total = total + flip / (flip + pp[..., good]) * weights[..., s]
    return total
