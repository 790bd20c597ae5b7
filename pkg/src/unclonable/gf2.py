"""Exact linear algebra over F_2 with vectors packed into Python ints.

A vector of length ``n`` is an int whose most significant of its ``n`` bits is
coordinate 0, so integer order is lexicographic order and the integer value is
also the computational-basis index of the corresponding n-qubit state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class DimensionMismatch(ValueError):
    pass


def to_bits(v: int, n: int) -> str:
    """Bitstring form of ``v``, coordinate 0 first."""
    if v < 0 or v >> n:
        raise DimensionMismatch(f"value {v} does not fit in {n} bits")
    return format(v, f"0{n}b") if n else ""


def from_bits(bits: str) -> int:
    bits = bits.strip()
    if bits and set(bits) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2) if bits else 0


def inner(a: int, b: int) -> int:
    """<a, b> mod 2."""
    return (a & b).bit_count() & 1


def random_bits(rng: np.random.Generator, n: int) -> int:
    """Uniform n-bit integer (works for any n)."""
    if n <= 0:
        return 0
    if n <= 62:
        return int(rng.integers(0, 1 << n))
    nbytes = (n + 7) // 8
    return int.from_bytes(rng.bytes(nbytes), "big") >> (8 * nbytes - n)


def _check_len(v: int, n: int) -> None:
    if v < 0 or v >> n:
        raise DimensionMismatch(f"vector {v:#x} is longer than n={n}")


def _echelon(vectors: Iterable[int]) -> dict[int, int]:
    """Map leading-bit position -> row for a (not yet reduced) echelon basis."""
    table: dict[int, int] = {}
    for v in vectors:
        while v:
            h = v.bit_length() - 1
            row = table.get(h)
            if row is None:
                table[h] = v
                break
            v ^= row
    return table


@dataclass(frozen=True)
class GF2Subspace:
    """Subspace of F_2^n held as its unique reduced row echelon basis.

    ``basis`` is sorted by pivot (pivot = leading coordinate), which for the
    MSB-first packing means descending integer order.
    """

    n: int
    basis: tuple[int, ...] = ()
    _pivots: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pivots = []
        for row in self.basis:
            _check_len(row, self.n)
            if row == 0:
                raise ValueError("RREF rows must be nonzero")
            pivots.append(row.bit_length() - 1)
        object.__setattr__(self, "_pivots", tuple(pivots))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivot_bits(self) -> tuple[int, ...]:
        """Pivot positions as integer bit indices (n-1 is coordinate 0)."""
        return self._pivots

    @property
    def pivot_mask(self) -> int:
        m = 0
        for p in self._pivots:
            m |= 1 << p
        return m

    def __len__(self) -> int:
        return 1 << self.dim

    def __contains__(self, v: int) -> bool:
        return contains(self, v)

    def elements(self) -> np.ndarray:
        """All 2^d elements; element i is the XOR of basis rows selected by
        the bits of i (basis[0] is the top bit of i)."""
        out = np.zeros(1, dtype=np.int64)
        for row in reversed(self.basis):
            out = np.concatenate([out, out ^ row])
        return out

    def to_text(self) -> str:
        return "\n".join(to_bits(r, self.n) for r in self.basis)

    @classmethod
    def from_text(cls, n: int, text: str) -> "GF2Subspace":
        rows = [from_bits(line) for line in text.splitlines() if line.strip()]
        return rref(rows, n)

    def __str__(self) -> str:
        rows = ", ".join(to_bits(r, self.n) for r in self.basis)
        return f"span{{{rows}}} <= F2^{self.n}"


def rref(vectors: Sequence[int], n: int) -> GF2Subspace:
    """Span of ``vectors`` in reduced row echelon form."""
    vectors = [int(v) for v in vectors]
    for v in vectors:
        _check_len(v, n)
    table = _echelon(vectors)
    pivots = sorted(table, reverse=True)
    rows = [table[p] for p in pivots]
    # back-substitute so each pivot column has a single 1
    for i, p in enumerate(pivots):
        for j in range(len(rows)):
            if j != i and (rows[j] >> p) & 1:
                rows[j] ^= rows[i]
    return GF2Subspace(n, tuple(rows))


def rank(vectors: Sequence[int]) -> int:
    return len(_echelon(int(v) for v in vectors))


def full_space(n: int) -> GF2Subspace:
    return GF2Subspace(n, tuple(1 << (n - 1 - i) for i in range(n)))


def zero_space(n: int) -> GF2Subspace:
    return GF2Subspace(n, ())


def dual(A: GF2Subspace) -> GF2Subspace:
    """Orthogonal complement {b : <a, b> = 0 for all a in A}."""
    n = A.n
    pivots = A.pivot_bits
    pivot_set = set(pivots)
    rows = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = 1 << f
        for row, p in zip(A.basis, pivots):
            if (row >> f) & 1:
                v |= 1 << p
        rows.append(v)
    return rref(rows, n)


def contains(A: GF2Subspace, v: int) -> bool:
    _check_len(v, A.n)
    for row, p in zip(A.basis, A.pivot_bits):
        if (v >> p) & 1:
            v ^= row
    return v == 0


def canonical_rep(A: GF2Subspace, v: int) -> int:
    """Lexicographically smallest vector of the coset A + v.

    Reducing by the RREF basis clears every pivot coordinate; any other coset
    element sets the pivot of its leading contributing row, so is larger.
    """
    _check_len(v, A.n)
    for row, p in zip(A.basis, A.pivot_bits):
        if (v >> p) & 1:
            v ^= row
    return v


def canonical_table(A: GF2Subspace) -> np.ndarray:
    """Can_A(v) for every v in F_2^n, indexed by v."""
    table = np.arange(1 << A.n, dtype=np.int64)
    for row, p in zip(A.basis, A.pivot_bits):
        table ^= ((table >> p) & 1) * row
    return table


def canonical_reps(A: GF2Subspace) -> np.ndarray:
    """CS(A) in increasing order: the vectors that vanish on every pivot."""
    free = [b for b in range(A.n) if b not in set(A.pivot_bits)]
    out = np.zeros(1, dtype=np.int64)
    for b in free:
        out = np.concatenate([out, out | (1 << b)])
    return np.sort(out)


def sample_subspace(n: int, d: int, rng: np.random.Generator) -> GF2Subspace:
    """Uniformly random d-dimensional subspace of F_2^n.

    Draws d uniform vectors and starts over on linear dependence; every
    d-dimensional subspace has the same number of ordered bases, so the span of
    an accepted tuple is uniform.
    """
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    while True:
        vecs = [random_bits(rng, n) for _ in range(d)]
        if rank(vecs) == d:
            return rref(vecs, n)


def sample_coset_rep(A: GF2Subspace, rng: np.random.Generator) -> int:
    """Uniform element of CS(A)."""
    return canonical_rep(A, random_bits(rng, A.n))


def intersection_dim(A: GF2Subspace, B: GF2Subspace) -> int:
    if A.n != B.n:
        raise DimensionMismatch(f"ambient dimensions differ: {A.n} vs {B.n}")
    return A.dim + B.dim - rank(list(A.basis) + list(B.basis))


def sum_space(A: GF2Subspace, B: GF2Subspace) -> GF2Subspace:
    if A.n != B.n:
        raise DimensionMismatch(f"ambient dimensions differ: {A.n} vs {B.n}")
    return rref(list(A.basis) + list(B.basis), A.n)


@dataclass(frozen=True)
class Coset:
    """The coset subspace + rep, with ``rep`` always canonical."""

    subspace: GF2Subspace
    rep: int

    def __post_init__(self):
        object.__setattr__(self, "rep", canonical_rep(self.subspace, self.rep))

    def __contains__(self, v: int) -> bool:
        return contains(self.subspace, v ^ self.rep)

    def elements(self) -> np.ndarray:
        return self.subspace.elements() ^ self.rep
