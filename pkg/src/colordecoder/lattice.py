"""Hexagonal color code on a torus, drawn on its dual triangular lattice.

Vertices of the dual lattice are checks, triangular faces are qubits.
Vertex ``(x, y)`` is taken mod ``L`` and square ``(x, y)`` is cut by its
anti-diagonal into a LOWER triangle with vertices ``(x,y), (x+1,y), (x,y+1)``
and an UPPER triangle with vertices ``(x+1,y), (x,y+1), (x+1,y+1)``.

Qubit index: ``2 * (y * L + x) + orientation``. Check index: ``y * L + x``.

The decoder works on a tower of lattices with ``L = 3 * 2**level``. A level
is cut into 2x2 blocks anchored at even coordinates; each block holds two
side-2 triangular cells of four qubits. A cell at level ``l`` becomes one
qubit of level ``l - 1`` and the corner check ``(2i, 2j)`` becomes check
``(i, j)``. Cell ``c`` of a level maps to coarse qubit index ``c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from . import f2

LOWER, UPPER = 0, 1
COLOR_NAMES = ("R", "B", "G")


class QubitId(NamedTuple):
    x: int
    y: int
    orientation: int  # LOWER or UPPER

    def vertices(self, L: int) -> tuple[tuple[int, int], ...]:
        x, y = self.x, self.y
        if self.orientation == LOWER:
            pts = ((x, y), (x + 1, y), (x, y + 1))
        else:
            pts = ((x + 1, y), (x, y + 1), (x + 1, y + 1))
        return tuple((a % L, b % L) for a, b in pts)


class CheckId(NamedTuple):
    x: int
    y: int

    @property
    def color(self) -> str:
        return COLOR_NAMES[(self.x - self.y) % 3]


@dataclass(frozen=True)
class CellDescriptor:
    """One side-2 triangular cell.

    ``qubits`` is ``(e0, e1, e2, e3)``: three corner triangles then the
    inverted center one. ``corner_checks[k]`` touches ``e_k`` only, and
    ``mid_edge_checks[k]`` has in-cell support given by
    :data:`colordecoder.cell.CHECK_SUPPORTS`.
    """

    index: int
    block: tuple[int, int]
    half: int
    qubits: tuple[int, int, int, int]
    mid_edge_checks: tuple[int, int, int]
    corner_checks: tuple[int, int, int]


@dataclass(frozen=True)
class CellLayout:
    """Array form of a level's cell decomposition, for vectorized passes.

    Mid-edge checks are enumerated once in ``mid_checks``; ``mid_sides[k]``
    lists the ``(cell, slot)`` of its two sides, side 0 being the one with
    the lower cell index. ``cell_mid[c, k]`` and ``cell_side[c, k]`` invert
    that map. Corner checks are enumerated in coarse-check order.
    """

    qubits: np.ndarray  # (C, 4) qubit indices
    mid: np.ndarray  # (C, 3) check indices
    corners: np.ndarray  # (C, 3) check indices
    mid_checks: np.ndarray  # (M,)
    mid_sides: np.ndarray  # (M, 2, 2)
    cell_mid: np.ndarray  # (C, 3) index into mid_checks
    cell_side: np.ndarray  # (C, 3) 0 or 1
    corner_checks: np.ndarray  # (K,) fine check index of coarse check k
    corner_cells: np.ndarray  # (K, 6)
    corner_slots: np.ndarray  # (K, 6) in {0, 1, 2}

    @property
    def num_cells(self) -> int:
        return self.qubits.shape[0]


@dataclass(eq=False)
class LatticeLevel:
    level: int
    L: int = field(init=False)

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be nonnegative")
        self.L = 3 * 2**self.level

    @property
    def n(self) -> int:
        return 2 * self.L**2

    @property
    def num_checks(self) -> int:
        return self.L**2

    def qubit_index(self, x: int, y: int, orientation: int) -> int:
        L = self.L
        return 2 * ((y % L) * L + (x % L)) + orientation

    def qubit_id(self, q: int) -> QubitId:
        sq, o = divmod(int(q), 2)
        y, x = divmod(sq, self.L)
        return QubitId(x, y, o)

    def check_index(self, x: int, y: int) -> int:
        return (y % self.L) * self.L + (x % self.L)

    def check_id(self, c: int) -> CheckId:
        y, x = divmod(int(c), self.L)
        return CheckId(x, y)

    @cached_property
    def qubit_checks(self) -> np.ndarray:
        """``(n, 3)`` check indices of each qubit, in triangle-vertex order."""
        out = np.empty((self.n, 3), dtype=np.intp)
        for q in range(self.n):
            out[q] = [self.check_index(*v) for v in self.qubit_id(q).vertices(self.L)]
        return out

    @cached_property
    def check_qubits(self) -> np.ndarray:
        """``(L^2, 6)`` qubit indices of each check, sorted."""
        members: list[list[int]] = [[] for _ in range(self.num_checks)]
        for q, checks in enumerate(self.qubit_checks):
            for c in checks:
                members[c].append(q)
        return np.array([sorted(m) for m in members], dtype=np.intp)

    @cached_property
    def check_colors(self) -> np.ndarray:
        """Color class 0/1/2 (R/B/G) of every check."""
        c = np.arange(self.num_checks)
        y, x = np.divmod(c, self.L)
        return (x - y) % 3

    @cached_property
    def check_matrix(self) -> np.ndarray:
        H = np.zeros((self.num_checks, self.n), dtype=np.uint8)
        rows = np.repeat(np.arange(self.num_checks), 6)
        H[rows, self.check_qubits.ravel()] = 1
        return H

    def syndrome_of(self, e) -> np.ndarray:
        """``H e`` over GF(2); ``e`` may carry leading batch axes."""
        e = np.asarray(e)
        if e.shape[-1] != self.n:
            raise ValueError(f"error pattern has length {e.shape[-1]}, expected {self.n}")
        return (e[..., self.check_qubits].sum(axis=-1) & 1).astype(np.uint8)

    @cached_property
    def logical_basis(self) -> list[np.ndarray]:
        return f2.quotient_basis(self.check_matrix)

    @cached_property
    def logical_matrix(self) -> np.ndarray:
        return np.array(self.logical_basis, dtype=np.uint8)

    def logical_class(self, r) -> np.ndarray:
        """Pairing of zero-syndrome patterns with the logical basis.

        Because ``ker H`` is the orthogonal complement of the rowspace, a
        zero-syndrome residual is a stabilizer product exactly when every
        entry is 0. Works on batches.
        """
        r = np.asarray(r, dtype=np.int64)
        return ((r @ self.logical_matrix.T.astype(np.int64)) & 1).astype(np.uint8)

    # -- cells ---------------------------------------------------------------

    def _require_even(self):
        if self.L % 2:
            raise ValueError(f"level with L={self.L} is not decomposed into cells")

    @cached_property
    def cells(self) -> list[CellDescriptor]:
        self._require_even()
        q, ck = self.qubit_index, self.check_index
        out = []
        for j in range(self.L // 2):
            for i in range(self.L // 2):
                x, y = 2 * i, 2 * j
                lower = CellDescriptor(
                    index=len(out),
                    block=(x, y),
                    half=LOWER,
                    qubits=(q(x, y, LOWER), q(x + 1, y, LOWER), q(x, y + 1, LOWER), q(x, y, UPPER)),
                    mid_edge_checks=(ck(x + 1, y), ck(x, y + 1), ck(x + 1, y + 1)),
                    corner_checks=(ck(x, y), ck(x + 2, y), ck(x, y + 2)),
                )
                out.append(lower)
                upper = CellDescriptor(
                    index=len(out),
                    block=(x, y),
                    half=UPPER,
                    qubits=(
                        q(x + 1, y + 1, UPPER),
                        q(x, y + 1, UPPER),
                        q(x + 1, y, UPPER),
                        q(x + 1, y + 1, LOWER),
                    ),
                    mid_edge_checks=(ck(x + 1, y + 2), ck(x + 2, y + 1), ck(x + 1, y + 1)),
                    corner_checks=(ck(x + 2, y + 2), ck(x, y + 2), ck(x + 2, y)),
                )
                out.append(upper)
        return out

    @cached_property
    def layout(self) -> CellLayout:
        cells = self.cells
        qubits = np.array([c.qubits for c in cells], dtype=np.intp)
        mid = np.array([c.mid_edge_checks for c in cells], dtype=np.intp)
        corners = np.array([c.corner_checks for c in cells], dtype=np.intp)

        sides: dict[int, list[tuple[int, int]]] = {}
        for c in cells:
            for k, chk in enumerate(c.mid_edge_checks):
                sides.setdefault(chk, []).append((c.index, k))
        mid_checks = np.array(sorted(sides), dtype=np.intp)
        mid_sides = np.array([sorted(sides[chk]) for chk in mid_checks], dtype=np.intp)
        cell_mid = np.empty_like(mid)
        cell_side = np.empty_like(mid)
        for m, pair in enumerate(mid_sides):
            for s, (cell, slot) in enumerate(pair):
                cell_mid[cell, slot] = m
                cell_side[cell, slot] = s

        Lc = self.L // 2
        corner_checks = np.array(
            [self.check_index(2 * (k % Lc), 2 * (k // Lc)) for k in range(Lc * Lc)], dtype=np.intp
        )
        owners: dict[int, list[tuple[int, int]]] = {}
        for c in cells:
            for k, chk in enumerate(c.corner_checks):
                owners.setdefault(chk, []).append((c.index, k))
        corner_cells = np.array([[o[0] for o in owners[chk]] for chk in corner_checks], dtype=np.intp)
        corner_slots = np.array([[o[1] for o in owners[chk]] for chk in corner_checks], dtype=np.intp)
        return CellLayout(
            qubits=qubits,
            mid=mid,
            corners=corners,
            mid_checks=mid_checks,
            mid_sides=mid_sides,
            cell_mid=cell_mid,
            cell_side=cell_side,
            corner_checks=corner_checks,
            corner_cells=corner_cells,
            corner_slots=corner_slots,
        )

    def corner_neighborhood(self, corner: CheckId) -> list[tuple[QubitId, CellDescriptor, int]]:
        """The six qubits of a corner check with their owning cells.

        Each qubit is the corner qubit ``e_k`` of a distinct cell; ``k`` is
        returned alongside.
        """
        self._require_even()
        x, y = corner.x % self.L, corner.y % self.L
        if x % 2 or y % 2:
            raise ValueError(f"check {tuple(corner)} is not a cell corner")
        lay = self.layout
        k = (y // 2) * (self.L // 2) + x // 2
        return [
            (self.qubit_id(self.cells[cell].qubits[slot]), self.cells[cell], int(slot))
            for cell, slot in zip(lay.corner_cells[k], lay.corner_slots[k])
        ]


def incidence(level: LatticeLevel) -> tuple[np.ndarray, np.ndarray]:
    """``(check -> 6 qubits, qubit -> 3 checks)`` index arrays."""
    return level.check_qubits, level.qubit_checks


def check_matrix(level: LatticeLevel) -> np.ndarray:
    return level.check_matrix


def syndrome_of(level: LatticeLevel, e) -> np.ndarray:
    return level.syndrome_of(e)


def logical_basis(level: LatticeLevel) -> list[np.ndarray]:
    return level.logical_basis


def cell_decomposition(level: LatticeLevel) -> list[CellDescriptor]:
    return level.cells


def corner_neighborhood(level: LatticeLevel, corner: CheckId):
    return level.corner_neighborhood(corner)


@lru_cache(maxsize=None)
def get_level(level: int) -> LatticeLevel:
    """Shared, lazily populated level instance."""
    return LatticeLevel(level)


class LatticeHierarchy:
    """Levels ``0..m``; level ``m`` is the physical lattice, level 0 has L=3."""

    def __init__(self, m: int):
        if m < 0:
            raise ValueError("m must be nonnegative")
        self.m = m
        self.levels = [get_level(l) for l in range(m + 1)]

    def __getitem__(self, level: int) -> LatticeLevel:
        return self.levels[level]

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def top(self) -> LatticeLevel:
        return self.levels[-1]

    def coarse_qubit(self, level: int, cell: int) -> QubitId:
        """Coarse qubit at ``level - 1`` replacing ``cell`` of ``level``."""
        c = self.levels[level].cells[cell]
        return QubitId(c.block[0] // 2, c.block[1] // 2, c.half)

    def coarse_check(self, level: int, corner: CheckId) -> CheckId:
        if corner.x % 2 or corner.y % 2:
            raise ValueError(f"check {tuple(corner)} is not a cell corner")
        return CheckId(corner.x // 2, corner.y // 2)

    def info(self) -> dict:
        return {
            "m": self.m,
            "levels": [
                {"level": lv.level, "L": lv.L, "n": lv.n, "checks": lv.num_checks}
                for lv in reversed(self.levels)
            ],
            "n": self.top.n,
            "k": 4,
            "d": 2 ** (self.m + 2),
            "d_formula": "2^(m+2)",
        }


def build_hierarchy(m: int) -> LatticeHierarchy:
    return LatticeHierarchy(m)


def verify_rescalable(n: int) -> bool:
    """Can a side-``n`` triangular cell host an operator flipping only its corners?

    Builds all ``n**2`` triangles of the cell and every vertex as a check, and
    solves for an error pattern whose syndrome is exactly the three corners.
    """
    if n < 1:
        raise ValueError("side length must be positive")
    verts = [(a, b) for b in range(n + 1) for a in range(n + 1 - b)]
    vindex = {v: i for i, v in enumerate(verts)}
    tris = [((a, b), (a + 1, b), (a, b + 1)) for b in range(n) for a in range(n - b)]
    tris += [((a + 1, b), (a, b + 1), (a + 1, b + 1)) for b in range(n - 1) for a in range(n - 1 - b)]
    A = np.zeros((len(verts), len(tris)), dtype=np.uint8)
    for t, tri in enumerate(tris):
        for v in tri:
            A[vindex[v], t] = 1
    target = np.zeros(len(verts), dtype=np.uint8)
    for corner in ((0, 0), (n, 0), (0, n)):
        target[vindex[corner]] = 1
    return f2.solve(A, target) is not None
