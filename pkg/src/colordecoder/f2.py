"""Dense GF(2) linear algebra on bit-packed rows.

Public functions take and return plain ``uint8`` numpy arrays holding 0/1
values (a 1-D array is a bit vector, a 2-D array a binary matrix).
Internally rows are packed into ``uint64`` words so that row operations are
word-parallel XORs.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_bits",
    "gauss_reduce",
    "rank",
    "kernel_basis",
    "in_rowspace",
    "solve",
    "quotient_basis",
]


def as_bits(a) -> np.ndarray:
    """Coerce array-like input to a ``uint8`` array of 0/1 values."""
    return (np.asarray(a) & 1).astype(np.uint8)


def _pack(M: np.ndarray) -> np.ndarray:
    rows, cols = M.shape
    words = max(1, -(-cols // 64))
    padded = np.zeros((rows, words * 64), dtype=np.uint8)
    padded[:, :cols] = M
    return np.packbits(padded, axis=1, bitorder="little").view("<u8").copy()


def _unpack(P: np.ndarray, cols: int) -> np.ndarray:
    bits = np.unpackbits(P.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :cols].astype(np.uint8)


def _reduce_packed(P: np.ndarray, cols: int) -> list[int]:
    """In-place RREF of packed rows; returns pivot columns."""
    nrows = P.shape[0]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == nrows:
            break
        w, b = divmod(c, 64)
        column = (P[r:, w] >> np.uint64(b)) & np.uint64(1)
        hits = np.flatnonzero(column)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            P[[r, p]] = P[[p, r]]
        others = np.flatnonzero((P[:, w] >> np.uint64(b)) & np.uint64(1))
        others = others[others != r]
        if others.size:
            P[others] ^= P[r]
        pivots.append(c)
        r += 1
    return pivots


def gauss_reduce(M) -> tuple[int, np.ndarray, list[int]]:
    """Reduced row-echelon form over GF(2).

    Pivots are chosen at the lowest available column, so the result is
    unique for a given matrix.

    Returns:
        ``(rank, reduced, pivots)`` where ``reduced`` has the same shape as
        ``M`` (zero rows at the bottom) and ``pivots`` is strictly increasing.
    """
    M = np.atleast_2d(as_bits(M))
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return 0, M.copy(), []
    P = _pack(M)
    pivots = _reduce_packed(P, cols)
    return len(pivots), _unpack(P, cols), pivots


def rank(M) -> int:
    return gauss_reduce(M)[0]


def kernel_basis(M) -> list[np.ndarray]:
    """Basis of ``{v : M v = 0}``, one vector per free column."""
    M = np.atleast_2d(as_bits(M))
    cols = M.shape[1]
    r, R, pivots = gauss_reduce(M)
    pivot_set = set(pivots)
    basis = []
    for f in range(cols):
        if f in pivot_set:
            continue
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        v[pivots] = R[:r, f]
        basis.append(v)
    return basis


def solve(M, b) -> np.ndarray | None:
    """Return one ``x`` with ``M x = b``, or ``None`` when inconsistent.

    Free variables are set to zero.
    """
    M = np.atleast_2d(as_bits(M))
    b = as_bits(b).reshape(-1)
    rows, cols = M.shape
    if b.shape[0] != rows:
        raise ValueError(f"right-hand side has length {b.shape[0]}, expected {rows}")
    aug = np.concatenate([M, b[:, None]], axis=1)
    r, R, pivots = gauss_reduce(aug)
    if pivots and pivots[-1] == cols:
        return None
    x = np.zeros(cols, dtype=np.uint8)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, cols]
    return x


def in_rowspace(M, v) -> bool:
    """True iff ``v`` is a GF(2) combination of the rows of ``M``."""
    M = np.atleast_2d(as_bits(M))
    v = as_bits(v).reshape(-1)
    if v.shape[0] != M.shape[1]:
        raise ValueError(f"vector has length {v.shape[0]}, matrix has {M.shape[1]} columns")
    if not v.any():
        return True
    return solve(M.T, v) is not None


def quotient_basis(H) -> list[np.ndarray]:
    """Representatives of a basis of ``ker(H) / rowspace(H)``.

    Requires ``H H^T = 0``. Kernel vectors are taken in the order produced by
    :func:`kernel_basis` and kept whenever they are independent of the rows
    seen so far, so the result is deterministic.
    """
    H = np.atleast_2d(as_bits(H))
    gram = (H.astype(np.int64) @ H.T.astype(np.int64)) & 1
    if gram.any():
        i, j = map(int, np.argwhere(gram)[0])
        raise ValueError(f"rowspace is not self-orthogonal: rows {i} and {j} overlap oddly")
    r, R, pivots = gauss_reduce(H)
    rows = [R[i] for i in range(r)]
    target = H.shape[1] - 2 * r
    reps = []
    for v in kernel_basis(H):
        if len(reps) == target:
            break
        echelon = np.array(rows)
        hits = v[pivots].astype(bool)
        residue = v ^ (np.bitwise_xor.reduce(echelon[hits], axis=0) if hits.any() else 0)
        if not residue.any():
            continue
        c = int(np.flatnonzero(residue)[0])
        for i, row in enumerate(rows):
            if row[c]:
                rows[i] = row ^ residue
        rows.append(residue)
        pivots.append(c)
        reps.append(v)
    return reps
