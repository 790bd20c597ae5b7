"""Monogamy-of-entanglement games for Wiesner and coset states, and the
single-party direct-product game."""

from __future__ import annotations

from functools import lru_cache, partial

import numpy as np

from .. import cosets, gf2, qsim
from ..cosets import membership_oracle
from ..schemes import wiesner_state
from .harness import GameOutcome, Register, Split, TrialResult, run_trials

# Wiesner states


class WiesnerStrategy:
    """Base class; subclasses override the three stages."""

    def stage_a(self, psi: np.ndarray, lam: int, rng) -> Split:
        raise NotImplementedError

    def stage_b(self, reg: Register, side: dict, theta: int, lam: int, rng) -> int:
        raise NotImplementedError

    def stage_c(self, reg: Register, side: dict, theta: int, lam: int, rng) -> int:
        raise NotImplementedError


class WiesnerForwardB(WiesnerStrategy):
    """All qubits to B, who measures in the revealed bases; C guesses blindly."""

    def stage_a(self, psi, lam, rng):
        return Split(psi, b_qubits=tuple(range(lam)))

    def stage_b(self, reg, side, theta, lam, rng):
        for i in range(lam):
            if (theta >> (lam - 1 - i)) & 1:
                reg.apply(qsim.H, [i])
        return reg.measure(rng)

    def stage_c(self, reg, side, theta, lam, rng):
        return gf2.random_bits(rng, lam)


@lru_cache(maxsize=None)
def breidbart_unitary(lam: int) -> np.ndarray:
    """R^dag on every qubit, R the rotation by pi/8 (basis between Z and X)."""
    c, s = np.cos(np.pi / 8), np.sin(np.pi / 8)
    R = np.array([[c, -s], [s, c]], dtype=complex)
    return qsim.kron_all([R.conj().T] * lam)


class WiesnerBreidbart(WiesnerStrategy):
    """A measures every qubit in the pi/8-rotated basis and broadcasts the outcome."""

    def stage_a(self, psi, lam, rng):
        v, _ = qsim.measure(breidbart_unitary(lam) @ psi, range(lam), rng)
        return Split(side_b={"v": v}, side_c={"v": v})

    def stage_b(self, reg, side, theta, lam, rng):
        return side["v"]

    stage_c = stage_b


class WiesnerBothRandom(WiesnerStrategy):
    def stage_a(self, psi, lam, rng):
        return Split()

    def stage_b(self, reg, side, theta, lam, rng):
        return gf2.random_bits(rng, lam)

    stage_c = stage_b


WIESNER_STRATEGIES = {
    "forward-b": WiesnerForwardB,
    "breidbart": WiesnerBreidbart,
    "both-random": WiesnerBothRandom,
}


def breidbart_closed_form(lam: int) -> float:
    return float(np.cos(np.pi / 8) ** (2 * lam))


def _moe_wiesner_trial(rng, index, lam, strategy, transcripts=False):
    strat = WIESNER_STRATEGIES[strategy]()
    x, theta = gf2.random_bits(rng, lam), gf2.random_bits(rng, lam)
    split = strat.stage_a(wiesner_state(x, theta, lam), lam, rng)
    B, C = split.open()
    xb = strat.stage_b(B, split.side_b, theta, lam, rng)
    xc = strat.stage_c(C, split.side_c, theta, lam, rng)
    win = xb == x and xc == x
    tr = {"x": x, "theta": theta, "x_B": xb, "x_C": xc, "win": win} if transcripts else None
    return TrialResult(win, None, tr)


def run_moe_wiesner(
    strategy: str, lam: int, trials: int, seed: int, threads: int = 1, transcripts: bool = False
) -> GameOutcome:
    if strategy not in WIESNER_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(WIESNER_STRATEGIES)}")
    if lam < 1:
        raise ValueError("need lambda >= 1")
    limit = qsim.MAX_OPERATOR_QUBITS if strategy == "breidbart" else qsim.MAX_QUBITS
    if lam > limit:
        raise qsim.ResourceLimit(f"lambda {lam} exceeds the {strategy} limit of {limit} qubits")
    fn = partial(_moe_wiesner_trial, lam=lam, strategy=strategy, transcripts=transcripts)
    return run_trials("moe-wiesner", fn, trials, seed, lam, {"strategy": strategy}, threads, transcripts)


# coset states


def _uniform_pair(A, rng) -> tuple[int, int]:
    return gf2.sample_coset_rep(A, rng), gf2.sample_coset_rep(gf2.dual(A), rng)


class CosetStrategy:
    """Stages receive membership oracles as a (P_{A+s}, P_{A^perp+s'}) pair or None."""

    def stage_a(self, psi, lam, oracles, rng) -> Split:
        raise NotImplementedError

    def stage_b(self, reg, side, A, oracles, rng) -> tuple[int, int]:
        raise NotImplementedError

    def stage_c(self, reg, side, A, oracles, rng) -> tuple[int, int]:
        raise NotImplementedError


class CosetForwardB(CosetStrategy):
    """State to B, who decodes with the revealed A; C guesses uniformly."""

    def stage_a(self, psi, lam, oracles, rng):
        return Split(psi, b_qubits=tuple(range(lam)))

    def stage_b(self, reg, side, A, oracles, rng):
        s, sp, _ = cosets.decode(reg.take(), A, rng)
        return s, sp

    def stage_c(self, reg, side, A, oracles, rng):
        return _uniform_pair(A, rng)


class CosetBothRandom(CosetStrategy):
    def stage_a(self, psi, lam, oracles, rng):
        return Split()

    def stage_b(self, reg, side, A, oracles, rng):
        return _uniform_pair(A, rng)

    stage_c = stage_b


class CosetMeasureBroadcast(CosetStrategy):
    """A measures in the computational basis and broadcasts v plus a shared random r.

    B and C output (Can_A(v), Can_{A^perp}(r)): s is exact, s' a shared blind guess.
    """

    def stage_a(self, psi, lam, oracles, rng):
        v, _ = qsim.measure(psi, range(lam), rng)
        side = {"v": v, "r": gf2.random_bits(rng, lam)}
        return Split(side_b=side, side_c=dict(side))

    def stage_b(self, reg, side, A, oracles, rng):
        return gf2.canonical_rep(A, side["v"]), gf2.canonical_rep(gf2.dual(A), side["r"])

    stage_c = stage_b


COSET_STRATEGIES = {
    "forward-b": CosetForwardB,
    "both-random": CosetBothRandom,
    "measure-broadcast": CosetMeasureBroadcast,
}


def _oracle_pair(A, s, sp, budget):
    return membership_oracle(A, s, budget), membership_oracle(gf2.dual(A), sp, budget)


def _moe_coset_trial(rng, index, lam, strategy, with_oracles, budget, transcripts=False):
    strat = COSET_STRATEGIES[strategy]()
    A = gf2.sample_subspace(lam, lam // 2, rng)
    p = cosets.CosetStateParams.random(A, rng)
    psi = cosets.prepare(A, p.s, p.sp, check=False)
    orc = (lambda: _oracle_pair(A, p.s, p.sp, budget)) if with_oracles else (lambda: None)
    split = strat.stage_a(psi, lam, orc(), rng)
    B, C = split.open()
    gb = strat.stage_b(B, split.side_b, A, orc(), rng)
    gc = strat.stage_c(C, split.side_c, A, orc(), rng)
    win = tuple(gb) == (p.s, p.sp) and tuple(gc) == (p.s, p.sp)
    tr = None
    if transcripts:
        tr = {"s": p.s, "sp": p.sp, "guess_B": list(gb), "guess_C": list(gc), "win": win}
    return TrialResult(win, None, tr)


def run_moe_coset(
    strategy: str,
    lam: int,
    trials: int,
    seed: int,
    with_membership_oracles: bool = False,
    budget: int | None = None,
    threads: int = 1,
    transcripts: bool = False,
) -> GameOutcome:
    if strategy not in COSET_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(COSET_STRATEGIES)}")
    if lam < 2 or lam % 2:
        raise ValueError(f"coset MOE needs even lambda >= 2, got {lam}")
    if lam > qsim.MAX_QUBITS:
        raise qsim.ResourceLimit(f"lambda {lam} exceeds {qsim.MAX_QUBITS} qubits")
    fn = partial(
        _moe_coset_trial,
        lam=lam,
        strategy=strategy,
        with_oracles=with_membership_oracles,
        budget=budget,
        transcripts=transcripts,
    )
    params = {"strategy": strategy, "membership_oracles": with_membership_oracles, "budget": budget}
    return run_trials("moe-coset", fn, trials, seed, lam, params, threads, transcripts)


# direct product


class DirectProductStrategy:
    """Single party: gets ``copies`` coset states and membership oracles, outputs (v, w)."""

    copies = 1
    needs_subspace = False

    def run(self, states: list, lam: int, oracles, A, rng) -> tuple[int, int]:
        raise NotImplementedError


class RandomPair(DirectProductStrategy):
    def run(self, states, lam, oracles, A, rng):
        return gf2.random_bits(rng, lam), gf2.random_bits(rng, lam)


class TwoCopies(DirectProductStrategy):
    """Measure one copy directly and the other after H on every qubit."""

    copies = 2

    def run(self, states, lam, oracles, A, rng):
        v, _ = qsim.measure(states[0], range(lam), rng)
        w, _ = qsim.measure(qsim.hadamard_all(states[1]), range(lam), rng)
        return v, w


class HonestDecoder(DirectProductStrategy):
    """Sanity wiring: the subspace is handed over and the state decoded."""

    needs_subspace = True

    def run(self, states, lam, oracles, A, rng):
        s, sp, _ = cosets.decode(states[0], A, rng)
        return s, sp


DIRECT_PRODUCT_STRATEGIES = {
    "random-pair": RandomPair,
    "two-copies": TwoCopies,
    "honest-decoder": HonestDecoder,
}


def _direct_product_trial(rng, index, lam, strategy, budget, transcripts=False):
    strat = DIRECT_PRODUCT_STRATEGIES[strategy]()
    A = gf2.sample_subspace(lam, lam // 2, rng)
    p = cosets.CosetStateParams.random(A, rng)
    psi = cosets.prepare(A, p.s, p.sp, check=False)
    oracles = _oracle_pair(A, p.s, p.sp, budget)
    v, w = strat.run([psi.copy() for _ in range(strat.copies)], lam, oracles, A if strat.needs_subspace else None, rng)
    win = gf2.contains(A, v ^ p.s) and gf2.contains(gf2.dual(A), w ^ p.sp)
    tr = {"s": p.s, "sp": p.sp, "v": v, "w": w, "win": win} if transcripts else None
    return TrialResult(win, None, tr)


def run_direct_product(
    strategy: str, lam: int, trials: int, seed: int, budget: int | None = None, threads: int = 1, transcripts=False
) -> GameOutcome:
    if strategy not in DIRECT_PRODUCT_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(DIRECT_PRODUCT_STRATEGIES)}")
    if lam < 2 or lam % 2:
        raise ValueError(f"direct-product game needs even lambda >= 2, got {lam}")
    if lam > qsim.MAX_QUBITS:
        raise qsim.ResourceLimit(f"lambda {lam} exceeds {qsim.MAX_QUBITS} qubits")
    fn = partial(_direct_product_trial, lam=lam, strategy=strategy, budget=budget, transcripts=transcripts)
    cls = DIRECT_PRODUCT_STRATEGIES[strategy]
    params = {"strategy": strategy, "budget": budget, "copies": cls.copies, "subspace_revealed": cls.needs_subspace}
    return run_trials("direct-product", fn, trials, seed, lam, params, threads, transcripts)
