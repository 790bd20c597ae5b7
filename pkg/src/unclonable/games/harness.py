"""Monte Carlo harness shared by all games.

Each trial gets its own generator seeded from (seed, trial index), so results
do not depend on how trials are spread over worker processes. Parties B and
C act on a :class:`SharedState` through :class:`Register` handles that only
touch their own qubits; neither can read amplitudes of the joint state.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .. import qsim
from ..errors import ProtocolViolation


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


# registers


class SharedState:
    """Joint state of everything A handed out (None when nothing quantum)."""

    def __init__(self, psi: np.ndarray | None):
        self.psi = None if psi is None else np.asarray(psi, dtype=complex)

    @property
    def num_qubits(self) -> int:
        return 0 if self.psi is None else qsim.num_qubits(self.psi)


class Register:
    """One party's handle on a subset of the shared qubits."""

    def __init__(self, shared: SharedState, qubits: Sequence[int], owner: str):
        self.shared = shared
        self.qubits = list(qubits)
        self.owner = owner

    def __len__(self):
        return len(self.qubits)

    def _globals(self, local: Sequence[int] | None) -> list[int]:
        local = range(len(self.qubits)) if local is None else local
        out = []
        for i in local:
            if not 0 <= i < len(self.qubits):
                raise ProtocolViolation(f"{self.owner} addressed qubit {i} outside its register of {len(self)}")
            out.append(self.qubits[i])
        return out

    def apply(self, U: np.ndarray, local: Sequence[int] | None = None):
        self.shared.psi = qsim.apply(U, self.shared.psi, self._globals(local))

    def measure(self, rng: np.random.Generator, local: Sequence[int] | None = None) -> int:
        if not self.qubits and local is None:
            return 0
        out, self.shared.psi = qsim.measure(self.shared.psi, self._globals(local), rng)
        return out

    def measure_projectors(self, projectors: Sequence[np.ndarray], rng: np.random.Generator) -> int:
        """Projective measurement on the whole register; returns the outcome index."""
        out, self.shared.psi = qsim.measure_projectors(self.shared.psi, projectors, self.qubits, rng)
        return out

    def take(self) -> np.ndarray:
        """The register's pure state; only allowed when it holds every shared qubit."""
        if len(self.qubits) != self.shared.num_qubits:
            raise ProtocolViolation(f"{self.owner} can only take the state when it holds all qubits")
        psi = self.shared.psi
        if self.qubits != sorted(self.qubits):
            # reorder axes into the register's own qubit order
            k = len(self.qubits)
            psi = psi.reshape([2] * k).transpose(self.qubits).reshape(-1)
        return psi.copy()


@dataclass
class Split:
    """What stage A hands out: a joint state, the register split and side information."""

    psi: np.ndarray | None = None
    b_qubits: tuple = ()
    c_qubits: tuple = ()
    side_b: dict = field(default_factory=dict)
    side_c: dict = field(default_factory=dict)

    def open(self) -> tuple[Register, Register]:
        shared = SharedState(self.psi)
        b, c = set(self.b_qubits), set(self.c_qubits)
        if len(b) != len(self.b_qubits) or len(c) != len(self.c_qubits):
            raise ProtocolViolation("duplicate qubits in a register")
        if b & c:
            raise ProtocolViolation(f"registers overlap on qubits {sorted(b & c)}")
        if any(not 0 <= q < shared.num_qubits for q in b | c):
            raise ProtocolViolation("register refers to a qubit that was not handed out")
        return Register(shared, self.b_qubits, "B"), Register(shared, self.c_qubits, "C")


# outcomes


@dataclass
class TrialResult:
    win: bool
    stats: dict | None = None
    transcript: dict | None = None


@dataclass
class GameOutcome:
    game: str
    lam: int
    trials: int
    wins: int
    seed: int
    params: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    transcripts: list | None = None

    @property
    def estimate(self) -> float:
        return self.wins / self.trials

    @property
    def mc_sigma(self) -> float:
        p = self.estimate
        return math.sqrt(p * (1 - p) / self.trials)

    sigma = mc_sigma

    def to_record(self) -> dict:
        rec = {
            "game": self.game,
            "lambda": self.lam,
            "trials": self.trials,
            "params": dict(self.params),
            "wins": self.wins,
            "estimate": self.estimate,
            "sigma": self.mc_sigma,
            "seed": self.seed,
        }
        if self.stats:
            rec["stats"] = dict(self.stats)
        return rec


def _run_chunk(fn: Callable, seed: int, start: int, stop: int) -> list:
    return [fn(trial_rng(seed, i), i) for i in range(start, stop)]


def map_trials(fn: Callable[[np.random.Generator, int], Any], count: int, seed: int, threads: int = 1) -> list:
    """[fn(rng_i, i) for i in range(count)], optionally over worker processes.

    ``fn`` must be picklable when threads > 1 (a module-level function or a
    functools.partial of one).
    """
    if count < 1:
        raise ValueError("need at least one trial")
    threads = max(1, int(threads))
    if threads == 1 or count < 2 * threads:
        return _run_chunk(fn, seed, 0, count)
    chunks = min(count, threads * 4)
    bounds = [count * j // chunks for j in range(chunks + 1)]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        parts = ex.map(_run_chunk, [fn] * chunks, [seed] * chunks, bounds[:-1], bounds[1:])
        return [r for part in parts for r in part]


def run_trials(
    game: str,
    trial_fn: Callable[[np.random.Generator, int], TrialResult],
    trials: int,
    seed: int,
    lam: int,
    params: dict,
    threads: int = 1,
    transcripts: bool = False,
) -> GameOutcome:
    results = map_trials(trial_fn, trials, seed, threads)
    wins = sum(1 for r in results if r.win)
    sums: dict[str, float] = {}
    for r in results:
        for k, v in (r.stats or {}).items():
            sums[k] = sums.get(k, 0.0) + float(v)
    stats = {f"mean_{k}": v / trials for k, v in sorted(sums.items())}
    return GameOutcome(
        game=game,
        lam=lam,
        trials=trials,
        wins=wins,
        seed=seed,
        params=params,
        stats=stats,
        transcripts=[r.transcript for r in results] if transcripts else None,
    )


def uniform_except(rng: np.random.Generator, bits: int, avoid: int) -> int:
    """Uniform over {0,1}^bits minus {avoid}."""
    u = int(rng.integers(0, (1 << bits) - 1))
    return u + 1 if u >= avoid else u
