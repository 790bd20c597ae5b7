"""Coset states, membership oracles and the coset-state decoder."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gf2, qsim
from .errors import QueryBudgetExceeded
from .gf2 import GF2Subspace


@dataclass(frozen=True)
class CosetStateParams:
    """The triple (A, s, s') with s in CS(A) and s' in CS(A^perp)."""

    A: GF2Subspace
    s: int
    sp: int

    def __post_init__(self):
        if gf2.canonical_rep(self.A, self.s) != self.s:
            raise ValueError(f"s={gf2.to_bits(self.s, self.A.n)} is not a canonical representative")
        if gf2.canonical_rep(gf2.dual(self.A), self.sp) != self.sp:
            raise ValueError(f"s'={gf2.to_bits(self.sp, self.A.n)} is not canonical for the dual")

    @classmethod
    def random(cls, A: GF2Subspace, rng: np.random.Generator) -> "CosetStateParams":
        return cls(A, gf2.sample_coset_rep(A, rng), gf2.sample_coset_rep(gf2.dual(A), rng))


def _signs(elements: np.ndarray, sp: int) -> np.ndarray:
    """(-1)^<s', a> for each a in ``elements``."""
    par = elements & sp
    parity = np.zeros(len(elements), dtype=np.int64)
    while np.any(par):
        parity ^= par & 1
        par = par >> 1
    return 1 - 2 * parity


def prepare(A: GF2Subspace, s: int, sp: int, check: bool = True) -> np.ndarray:
    """|A_{s,s'}> = |A|^{-1/2} sum_{a in A} (-1)^<s',a> |a + s>."""
    if check:
        CosetStateParams(A, s, sp)
    if A.n > qsim.MAX_QUBITS:
        raise qsim.ResourceLimit(f"{A.n} qubits exceeds the dense limit of {qsim.MAX_QUBITS}")
    elems = A.elements()
    psi = np.zeros(1 << A.n, dtype=complex)
    psi[elems ^ s] = _signs(elems, sp) / np.sqrt(len(elems))
    return psi


def prepare_params(p: CosetStateParams) -> np.ndarray:
    return prepare(p.A, p.s, p.sp, check=False)


def coset_family(A: GF2Subspace) -> tuple[list[tuple[int, int]], np.ndarray]:
    """All (s, s') labels for A and the matrix whose columns are |A_{s,s'}>."""
    D = gf2.dual(A)
    labels = [(int(s), int(sp)) for s in gf2.canonical_reps(A) for sp in gf2.canonical_reps(D)]
    cols = np.stack([prepare(A, s, sp, check=False) for s, sp in labels], axis=1)
    return labels, cols


def decode(psi: np.ndarray, A: GF2Subspace, rng: np.random.Generator) -> tuple[int, int, np.ndarray]:
    """Recover (s, s') from a state on n qubits using the description of A.

    Measures Can_A of the computational register (computed into an ancilla
    and uncomputed, i.e. a projection onto one coset of A), then does the same
    for Can_{A^perp} in the Hadamard basis. On |A_{s,s'}> both outcomes are
    deterministic and the state is returned undisturbed. ``psi`` may carry a
    trailing environment axis.
    """
    n = qsim.num_qubits(psi)
    if n != A.n:
        raise gf2.DimensionMismatch(f"state has {n} qubits, subspace lives in F_2^{A.n}")
    s, psi = qsim.measure_function(psi, gf2.canonical_table(A), rng)
    psi = qsim.hadamard_all(psi)
    sp, psi = qsim.measure_function(psi, gf2.canonical_table(gf2.dual(A)), rng)
    return s, sp, qsim.hadamard_all(psi)


class MembershipOracle:
    """Black-box predicate v -> [v in A + rep] with a query counter.

    ``budget`` (optional) caps the number of classical plus coherent calls.
    """

    def __init__(self, A: GF2Subspace, rep: int, budget: int | None = None):
        self.coset = gf2.Coset(A, rep)
        self.query_count = 0
        self.budget = budget

    @property
    def n(self) -> int:
        return self.coset.subspace.n

    def _tick(self):
        self.query_count += 1
        if self.budget is not None and self.query_count > self.budget:
            raise QueryBudgetExceeded(f"membership oracle budget {self.budget} exhausted")

    def __call__(self, v: int) -> int:
        self._tick()
        return int(v in self.coset)

    def table(self) -> np.ndarray:
        """Truth table over F_2^n (does not count as a query)."""
        A = self.coset.subspace
        return (gf2.canonical_table(A) == self.coset.rep).astype(np.int64)

    def apply_coherent(self, psi: np.ndarray, in_qubits, out_qubit: int) -> np.ndarray:
        """|v>|b> -> |v>|b xor P(v)> on the given registers."""
        self._tick()
        return qsim.apply_xor_function(psi, self.table(), in_qubits, [out_qubit])


def membership_oracle(A: GF2Subspace, rep: int, budget: int | None = None) -> MembershipOracle:
    if gf2.canonical_rep(A, rep) != rep:
        raise ValueError("membership oracle expects a canonical representative")
    return MembershipOracle(A, rep, budget)


def point_oracle_from_membership(A: GF2Subspace, P: MembershipOracle) -> Callable[[int], int]:
    """Predicate accepting only the canonical representative of P's coset.

    Uses P and the public description of A; the coset itself is never read.
    """

    def Q(z: int) -> int:
        return int(P(z) == 1 and gf2.canonical_rep(A, z) == z)

    return Q
