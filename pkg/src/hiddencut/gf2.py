"""Boolean linear algebra over Z2^n with int-packed bit rows.

Vectors are Python ints; bit i of the int is coordinate i (same little-endian
convention as cut masks: bit i <-> qubit i). Python ints give word-parallel
XOR elimination at any width.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

ENUMERATION_CAP = 22  # refuse to enumerate subspaces above this dimension


def dot(a: int, b: int) -> int:
    """Mod-2 inner product of two bit vectors."""
    return (a & b).bit_count() & 1


def weight(v: int) -> int:
    """Hamming weight."""
    return v.bit_count()


def to_bitstring(v: int, n: int) -> str:
    """Render v as an n-character string, MSB first (qubit n-1 leftmost)."""
    return format(v, f"0{n}b")


def from_bitstring(s: str) -> int:
    """Parse an MSB-first bit string back into an int vector."""
    return int(s, 2) if s else 0


def rref(rows: Sequence[int], ncols: int) -> tuple[list[int], int]:
    """Reduced row echelon form with deterministic lowest-column pivoting.

    Returns (rows, rank): pivot columns strictly increasing, each pivot column
    cleared from every other row, zero rows sunk to the bottom. Row count is
    preserved so rank = number of nonzero rows.
    """
    work = list(rows)
    reduced: list[int] = []
    for col in range(ncols):
        piv = next((i for i, r in enumerate(work) if (r >> col) & 1), None)
        if piv is None:
            continue
        prow = work.pop(piv)
        work = [r ^ prow if (r >> col) & 1 else r for r in work]
        reduced = [r ^ prow if (r >> col) & 1 else r for r in reduced]
        reduced.append(prow)
        if not work:
            break
    return reduced + [0] * (len(rows) - len(reduced)), len(reduced)


def rank(rows: Sequence[int], ncols: int) -> int:
    return rref(rows, ncols)[1]


class RankAccumulator:
    """Incremental GF(2) rank tracking for one sample at a time.

    Keeps an internally reduced basis keyed by lowest set bit, so `add` and
    `contains` are O(rank) word operations.
    """

    def __init__(self, rows: Iterable[int] = ()) -> None:
        self._pivots: dict[int, int] = {}
        for r in rows:
            self.add(r)

    def _reduce(self, v: int) -> int:
        while v:
            p = v & -v
            if p not in self._pivots:
                return v
            v ^= self._pivots[p]
        return 0

    def add(self, v: int) -> bool:
        """Insert v; True iff the rank increased."""
        v = self._reduce(v)
        if v == 0:
            return False
        self._pivots[v & -v] = v
        return True

    def contains(self, v: int) -> bool:
        return self._reduce(v) == 0

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def rows(self) -> list[int]:
        return list(self._pivots.values())


@dataclass(frozen=True)
class GF2Subspace:
    """A subspace of Z2^n held as a row-reduced basis.

    basis rows are in RREF: linearly independent, pivot (lowest set bit)
    strictly increasing, each pivot present in exactly one row.
    """

    basis: tuple[int, ...]
    ambient_dim: int

    def __post_init__(self) -> None:
        n = self.ambient_dim
        if n < 0:
            raise ValueError("ambient_dim must be nonnegative")
        last_pivot = -1
        for row in self.basis:
            if row <= 0 or row >> n:
                raise ValueError(f"basis row {row} out of range for n={n}")
            p = (row & -row).bit_length() - 1
            if p <= last_pivot:
                raise ValueError("basis rows are not in reduced echelon order")
            last_pivot = p

    @classmethod
    def from_rows(cls, rows: Sequence[int], ambient_dim: int) -> "GF2Subspace":
        reduced, rnk = rref(rows, ambient_dim)
        return cls(tuple(reduced[:rnk]), ambient_dim)

    @classmethod
    def zero(cls, ambient_dim: int) -> "GF2Subspace":
        return cls((), ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> "GF2Subspace":
        return cls(tuple(1 << i for i in range(ambient_dim)), ambient_dim)

    @property
    def dim(self) -> int:
        return len(self.basis)


def nullspace(rows: Sequence[int], ncols: int) -> GF2Subspace:
    """Basis of {x : rows . x = 0 mod 2}; dim = ncols - rank."""
    reduced, rnk = rref(rows, ncols)
    pivot_rows = reduced[:rnk]
    pivot_cols = [(r & -r).bit_length() - 1 for r in pivot_rows]
    pivot_set = set(pivot_cols)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = 1 << free
        for prow, pcol in zip(pivot_rows, pivot_cols):
            if (prow >> free) & 1:
                v |= 1 << pcol
        basis.append(v)
    return GF2Subspace.from_rows(basis, ncols)


def orthogonal_complement(s: GF2Subspace) -> GF2Subspace:
    """{z : z . b = 0 for every basis vector b}; an involution."""
    return nullspace(s.basis, s.ambient_dim)


def membership(s: GF2Subspace, v: int) -> bool:
    """True iff v reduces to zero against the basis."""
    for row in s.basis:
        if v & (row & -row):
            v ^= row
    return v == 0


def enumerate_subspace(s: GF2Subspace, cap: int = ENUMERATION_CAP) -> list[int]:
    """All 2^dim elements, each exactly once. Guarded by `cap` on the dimension."""
    if s.dim > cap:
        raise ValueError(f"subspace dimension {s.dim} exceeds enumeration cap {cap}")
    elems = [0]
    for b in s.basis:
        elems += [e ^ b for e in elems]
    return elems


def coset_representatives(parent: GF2Subspace, sub: GF2Subspace) -> list[int]:
    """One representative per coset of sub inside parent, always including 0."""
    if parent.ambient_dim != sub.ambient_dim:
        raise ValueError("ambient dimensions differ")
    acc = RankAccumulator(sub.basis)
    if acc.rank != sub.dim or not all(membership(parent, b) for b in sub.basis):
        raise ValueError("sub is not contained in parent")
    extension = []
    for b in parent.basis:
        if acc.add(b):
            extension.append(b)
    reps = [0]
    for b in extension:
        reps += [r ^ b for r in reps]
    return reps
