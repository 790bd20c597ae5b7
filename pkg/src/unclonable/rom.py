"""Simulated random oracles with reprogramming and query-weight accounting.

An :class:`OracleTable` is an immutable view of a function {0,1}^m -> {0,1}^k.
Unprogrammed values come from a counter-based hash of (key, input, word), so
they are fixed from the first access on, cost nothing to store and can be
rebuilt anywhere from the key alone. Reprogramming returns a new view with an
extra layer on top; the base view never changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from . import qsim
from .errors import QueryBudgetExceeded

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# largest input width for which a full table is materialized
MAX_COHERENT_BITS = 16

Value = Union[int, Callable[[int], int]]


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * _M1 & MASK64
    z = (z ^ (z >> 27)) * _M2 & MASK64
    return z ^ (z >> 31)


def _mix_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def _absorb(key: int, x: int) -> int:
    """Hash an arbitrary-width input into one 64-bit state."""
    h = _mix((key + _GOLDEN) & MASK64)
    while True:
        h = _mix((h ^ (x & MASK64)) + _GOLDEN & MASK64)
        x >>= 64
        if not x:
            return h


def _expand(h: int, k: int) -> int:
    """k output bits from a 64-bit state (top bits of successive words)."""
    out, got, j = 0, 0, 0
    while got < k:
        w = _mix((h + (j + 1) * _GOLDEN) & MASK64)
        take = min(64, k - got)
        out = (out << take) | (w >> (64 - take))
        got += take
        j += 1
    return out


@dataclass(frozen=True)
class _Rule:
    accept: Callable[[int], bool]
    value: Value


@dataclass(frozen=True)
class OracleTable:
    """Random function with persistent reprogramming layers."""

    m: int
    k: int
    key: int
    layers: tuple = ()
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    # classical access

    def base(self, x: int) -> int:
        return _expand(_absorb(self.key, x), self.k)

    def __call__(self, x: int) -> int:
        x = int(x)
        if x < 0 or x >> self.m:
            raise ValueError(f"input {x} does not fit in {self.m} bits")
        return self._eval(x, len(self.layers))

    query = __call__

    def _eval(self, x: int, top: int) -> int:
        for i in range(top - 1, -1, -1):
            layer = self.layers[i]
            if isinstance(layer, _Rule):
                hit, value = layer.accept(x), layer.value
            else:
                hit, value = layer[0] == x, layer[1]
            if hit:
                if callable(value):
                    # value is a function of the output underneath this layer
                    return int(value(self._eval(x, i))) & ((1 << self.k) - 1)
                return int(value)
        return self.base(x)

    # tables

    def base_table(self) -> np.ndarray:
        if self.m > MAX_COHERENT_BITS:
            raise qsim.ResourceLimit(f"domain 2^{self.m} too large to materialize")
        if self.k > 62 or self.m > 64:
            return np.array([self.base(x) for x in range(1 << self.m)], dtype=object)
        xs = np.arange(1 << self.m, dtype=np.uint64)
        h0 = np.uint64(_mix((self.key + _GOLDEN) & MASK64))
        with np.errstate(over="ignore"):
            h = _mix_np((h0 ^ xs) + np.uint64(_GOLDEN))
            w = _mix_np(h + np.uint64(_GOLDEN))
        return (w >> np.uint64(64 - self.k)).astype(np.int64)

    def table(self) -> np.ndarray:
        """Values on the whole domain (cached; views are immutable)."""
        if "table" not in self._cache:
            t = self.base_table()
            for i, layer in enumerate(self.layers):
                below = t.copy()
                if isinstance(layer, _Rule):
                    idx = [x for x in range(1 << self.m) if layer.accept(x)]
                    value = layer.value
                else:
                    idx, value = [layer[0]], layer[1]
                for x in idx:
                    t[x] = int(value(int(below[x]))) & ((1 << self.k) - 1) if callable(value) else value
            self._cache["table"] = t
        return self._cache["table"]

    # reprogramming

    def reprogram(self, point: int, value: Value) -> "OracleTable":
        point = int(point)
        if point < 0 or point >> self.m:
            raise ValueError(f"point {point} does not fit in {self.m} bits")
        if not callable(value) and (value < 0 or value >> self.k):
            raise ValueError(f"value {value} does not fit in {self.k} bits")
        return OracleTable(self.m, self.k, self.key, self.layers + ((point, value),))

    def reprogram_rule(self, accept: Callable[[int], bool], value: Value) -> "OracleTable":
        return OracleTable(self.m, self.k, self.key, self.layers + (_Rule(accept, value),))

    def apply_coherent(self, psi, in_qubits, out_qubits, log: "QueryLog | None" = None):
        return apply_coherent(self, psi, in_qubits, out_qubits, log)


def new_oracle(m: int, k: int, rng: np.random.Generator) -> OracleTable:
    """A fresh lazily-uniform function {0,1}^m -> {0,1}^k."""
    if m < 1 or k < 1:
        raise ValueError("need m, k >= 1")
    return OracleTable(m, k, int(rng.integers(0, 1 << 63)))


def reprogram(O: OracleTable, point: int, value: Value) -> OracleTable:
    return O.reprogram(point, value)


def reprogram_via_membership(
    O: OracleTable, Q_s: Callable[[int], int], Q_sp: Callable[[int], int], value: Value, half: int | None = None
) -> OracleTable:
    """Reprogram at the unique (z, z') with Q_s(z) = Q_s'(z') = 1.

    The input is split as z || z' with z on the top ``half`` bits (default
    m/2). Only the predicates are consulted; the point itself is never named.
    """
    half = O.m // 2 if half is None else half
    low = O.m - half
    lowmask = (1 << low) - 1

    def accept(x: int) -> bool:
        return bool(Q_s(x >> low)) and bool(Q_sp(x & lowmask))

    return O.reprogram_rule(accept, value)


def flip(v: int) -> int:
    return v ^ 1


@dataclass
class QueryLog:
    """Input-register weights W_y recorded before each coherent query."""

    weights: list = field(default_factory=list)

    def record(self, w: np.ndarray):
        self.weights.append(np.asarray(w, dtype=float))

    def __len__(self):
        return len(self.weights)

    def weight(self, i: int, y: int) -> float:
        return float(self.weights[i][y])


def input_weights(psi: np.ndarray, in_qubits: Sequence[int]) -> np.ndarray:
    """W_y: squared amplitude mass on each value y of the input register."""
    M = qsim._group(psi, list(in_qubits))
    return np.einsum("ij,ij->i", M.real, M.real) + np.einsum("ij,ij->i", M.imag, M.imag)


def apply_coherent(
    O: OracleTable, psi: np.ndarray, in_qubits: Sequence[int], out_qubits: Sequence[int], log: QueryLog | None = None
) -> np.ndarray:
    """XOR oracle |x>|y> -> |x>|y xor O(x)>."""
    if len(in_qubits) != O.m or len(out_qubits) != O.k:
        raise ValueError(
            f"registers of size ({len(in_qubits)}, {len(out_qubits)}) do not match oracle ({O.m}, {O.k})"
        )
    if O.m > MAX_COHERENT_BITS:
        raise qsim.ResourceLimit(f"domain 2^{O.m} too large for coherent access")
    if log is not None:
        log.record(input_weights(psi, in_qubits))
    return qsim.apply_xor_function(psi, O.table(), in_qubits, out_qubits)


class BudgetedOracle:
    """Per-stage handle on an oracle that counts and caps queries."""

    def __init__(self, oracle: OracleTable, budget: int | None = None):
        self.oracle = oracle
        self.budget = budget
        self.query_count = 0

    @property
    def m(self):
        return self.oracle.m

    @property
    def k(self):
        return self.oracle.k

    def _tick(self):
        self.query_count += 1
        if self.budget is not None and self.query_count > self.budget:
            raise QueryBudgetExceeded(f"oracle budget {self.budget} exhausted")

    def __call__(self, x: int) -> int:
        self._tick()
        return self.oracle(x)

    def apply_coherent(self, psi, in_qubits, out_qubits, log: QueryLog | None = None):
        self._tick()
        return apply_coherent(self.oracle, psi, in_qubits, out_qubits, log)


# BBBV reprogramming experiments


@dataclass
class OracleCircuit:
    """U_T O U_{T-1} ... O U_0 |init> with the oracle on fixed registers.

    ``unitaries`` has T + 1 entries acting on all qubits.
    """

    num_qubits: int
    in_qubits: tuple
    out_qubits: tuple
    init: np.ndarray
    unitaries: list

    @property
    def T(self) -> int:
        return len(self.unitaries) - 1


def run_circuit(
    circuit: OracleCircuit, oracle_at: Callable[[int], OracleTable], log: QueryLog | None = None
) -> np.ndarray:
    psi = circuit.unitaries[0] @ circuit.init
    for i in range(circuit.T):
        psi = apply_coherent(oracle_at(i), psi, circuit.in_qubits, circuit.out_qubits, log)
        psi = circuit.unitaries[i + 1] @ psi
    return psi


def bbbv_experiment(
    circuit: OracleCircuit,
    O: OracleTable,
    F: Iterable[tuple[int, int]],
    rng: np.random.Generator,
    values: dict | None = None,
    max_queries: int | None = None,
) -> tuple[float, float]:
    """Run the circuit against O and against O reprogrammed on F.

    F holds (query index i, input y) pairs; at query i the second run sees O
    with each such y reprogrammed. ``values`` maps (i, y) to the new output;
    missing entries get a uniformly random output different from O(y).
    Returns (trace distance of final states, sum of W_y(phi_i) over F).
    """
    if max_queries is not None and circuit.T > max_queries:
        raise QueryBudgetExceeded(f"circuit makes {circuit.T} queries, budget is {max_queries}")
    F = sorted(set((int(i), int(y)) for i, y in F))
    values = dict(values or {})
    per_query: dict[int, OracleTable] = {}
    for i, y in F:
        if not 0 <= i < circuit.T:
            raise ValueError(f"query index {i} outside [0, {circuit.T})")
        v = values.get((i, y))
        if v is None:
            v = O(y) ^ int(rng.integers(1, 1 << O.k))
        per_query[i] = per_query.get(i, O).reprogram(y, v)
    log = QueryLog()
    final = run_circuit(circuit, lambda i: O, log)
    final2 = run_circuit(circuit, lambda i: per_query.get(i, O))
    weight_sum = sum(log.weight(i, y) for i, y in F)
    return qsim.pure_trace_distance(final, final2), float(weight_sum)


def random_oracle_circuit(
    rng: np.random.Generator, T: int, m: int = 2, k: int = 1, work: int = 1, spread: float | None = None
) -> OracleCircuit:
    """Random circuit on m + k + work qubits making T queries.

    Each layer is exp(-i t G) for a random Hermitian G; ``spread`` bounds t
    (None draws a Haar layer), so small spreads give circuits whose query
    weight stays concentrated on a few inputs.
    """
    nq = m + k + work
    dim = 1 << nq
    us = []
    for _ in range(T + 1):
        if spread is None:
            us.append(qsim.haar_unitary(nq, rng))
        else:
            G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            G = (G + G.conj().T) / (2 * np.sqrt(dim))
            w, v = np.linalg.eigh(G)
            t = rng.uniform(0, spread)
            us.append((v * np.exp(-1j * t * w)) @ v.conj().T)
    return OracleCircuit(
        num_qubits=nq,
        in_qubits=tuple(range(m)),
        out_qubits=tuple(range(m, m + k)),
        init=qsim.basis_state(nq, int(rng.integers(dim))),
        unitaries=us,
    )


def _bbbv_instance(rng: np.random.Generator, index: int, eps: float, max_T: int = 8):
    T = int(rng.integers(1, max_T + 1))
    c = random_oracle_circuit(rng, T, spread=[None, 0.3, 1.0, 3.0][index % 4])
    O = new_oracle(2, 1, rng)
    log = QueryLog()
    run_circuit(c, lambda i: O, log)
    # fill F in random order with pairs whose total weight stays within eps^2 / T
    budget = eps * eps / T
    F, total = [], 0.0
    pairs = [(i, y) for i in range(T) for y in range(1 << O.m)]
    for j in rng.permutation(len(pairs)):
        i, y = pairs[j]
        w = log.weight(i, y)
        if total + w <= budget:
            F.append((i, y))
            total += w
    delta, weight_sum = bbbv_experiment(c, O, F, rng)
    return T, len(F), delta, weight_sum


def bbbv_sweep(eps: float, instances: int, seed: int) -> dict:
    """Check delta <= eps / 2 on random 4-qubit circuits with T <= 8 queries.

    Each instance reprograms a random set F whose query weight fits the
    eps^2 / T budget. Also tracks the hybrid-argument bound 2 eps.
    """
    if not 0 < eps:
        raise ValueError("eps must be positive")
    violations, hybrid_violations, checked, worst = 0, 0, 0, 0.0
    for index in range(instances):
        rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
        T, size, delta, ws = _bbbv_instance(rng, index, eps)
        if ws > eps * eps / T + 1e-12:
            continue
        checked += 1
        violations += delta > eps / 2 + 1e-9
        hybrid_violations += delta > 2 * eps + 1e-9
        worst = max(worst, delta / eps)
    return {
        "experiment": "bbbv",
        "eps": eps,
        "instances": instances,
        "checked": checked,
        "violations": violations,
        "hybrid_violations": hybrid_violations,
        "max_delta_over_eps": worst,
        "seed": seed,
    }
