"""Piracy experiment for copy-protected point functions."""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np

from .. import gf2, qsim, schemes
from ..qsim import ResourceLimit
from ..schemes import CPProgram, LinearDependenceAbort
from .harness import GameOutcome, Register, Split, TrialResult, map_trials, run_trials, uniform_except

# cap on CopyProtect retries within one trial
MAX_PROTECT_ATTEMPTS = 64


@dataclass(frozen=True)
class InputDistribution:
    """Test inputs (x_B, x_C) for f_y.

    With probability p output (y, y), q output (y, x_C), r output (x_B, y),
    otherwise (x_B, x_C), where x_B, x_C != y are independent and uniform.
    """

    p: float
    q: float
    r: float
    label: str = ""

    def __post_init__(self):
        probs = (self.p, self.q, self.r, self.rest)
        if any(v < -1e-12 or v > 1 + 1e-12 for v in probs):
            raise ValueError(f"invalid input distribution (p, q, r) = ({self.p}, {self.q}, {self.r})")

    @property
    def rest(self) -> float:
        return 1 - self.p - self.q - self.r

    @classmethod
    def product(cls, pb: float, pc: float) -> "InputDistribution":
        """x_B = y with probability pb and x_C = y with probability pc, independently."""
        if not (0 <= pb <= 1 and 0 <= pc <= 1):
            raise ValueError("product parameters must be probabilities")
        return cls(pb * pc, pb * (1 - pc), (1 - pb) * pc, f"product:{pb},{pc}")

    @classmethod
    def correlated(cls, w: float) -> "InputDistribution":
        """(x_B, x_C) with probability w, (y, y) otherwise."""
        if not 0 <= w <= 1:
            raise ValueError("w must be a probability")
        return cls(1 - w, 0.0, 0.0, f"correlated:{w}")

    @classmethod
    def parse(cls, text: str) -> "InputDistribution":
        """'product:pb,pc', 'correlated:w' or 'general:p,q,r'."""
        kind, _, rest = text.partition(":")
        try:
            vals = [float(v) for v in rest.split(",")] if rest else []
        except ValueError:
            raise ValueError(f"bad input distribution {text!r}") from None
        if kind == "product" and len(vals) == 2:
            return cls.product(*vals)
        if kind == "correlated" and len(vals) == 1:
            return cls.correlated(*vals)
        if kind == "general" and len(vals) == 3:
            return cls(*vals, label=text)
        raise ValueError(f"bad input distribution {text!r}")

    @property
    def hit_b(self) -> float:
        """Pr[x_B = y]."""
        return self.p + self.q

    @property
    def hit_c(self) -> float:
        return self.p + self.r

    def p_triv_b(self) -> float:
        return max(self.hit_b, 1 - self.hit_b)

    def p_triv_c(self) -> float:
        return max(self.hit_c, 1 - self.hit_c)

    def p_triv(self) -> float:
        return max(self.p_triv_b(), self.p_triv_c())

    def sample(self, y: int, lam: int, rng) -> tuple[int, int]:
        u = rng.random()
        xb, xc = uniform_except(rng, lam, y), uniform_except(rng, lam, y)
        if u < self.p:
            return y, y
        if u < self.p + self.q:
            return y, xc
        if u < self.p + self.q + self.r:
            return xb, y
        return xb, xc


class PiracyStrategy:
    def stage_a(self, prog: CPProgram, lam: int, G, H, dist: InputDistribution, rng) -> Split:
        raise NotImplementedError

    def stage_b(self, reg: Register, side: dict, x: int, G, H, dist, rng) -> int:
        raise NotImplementedError

    def stage_c(self, reg: Register, side: dict, x: int, G, H, dist, rng) -> int:
        raise NotImplementedError


def _honest_eval(reg, side, x, G, H, rng) -> int:
    prog = CPProgram(reg.take(), side["tag"], side["lam"])
    try:
        bit, _ = schemes.cp_eval(prog, x, G, H, rng)
    except LinearDependenceAbort:
        # G(x) is dependent, so x cannot be the protected point
        return 0
    return bit


def _best_blind(hit: float) -> int:
    return int(hit > 0.5)


class ForwardB(PiracyStrategy):
    """sigma to B, who evaluates honestly; C outputs its most likely bit."""

    def stage_a(self, prog, lam, G, H, dist, rng):
        return Split(prog.state, b_qubits=tuple(range(2 * lam)), side_b={"tag": prog.tag, "lam": lam})

    def stage_b(self, reg, side, x, G, H, dist, rng):
        return _honest_eval(reg, side, x, G, H, rng)

    def stage_c(self, reg, side, x, G, H, dist, rng):
        return _best_blind(dist.hit_c)


class ForwardC(PiracyStrategy):
    def stage_a(self, prog, lam, G, H, dist, rng):
        return Split(prog.state, c_qubits=tuple(range(2 * lam)), side_c={"tag": prog.tag, "lam": lam})

    def stage_b(self, reg, side, x, G, H, dist, rng):
        return _best_blind(dist.hit_b)

    def stage_c(self, reg, side, x, G, H, dist, rng):
        return _honest_eval(reg, side, x, G, H, rng)


class Trivial(PiracyStrategy):
    """sigma to whichever party guesses worse blind; the other guesses its best bit."""

    def _inner(self, dist):
        return ForwardB() if dist.p_triv_c() >= dist.p_triv_b() else ForwardC()

    def stage_a(self, prog, lam, G, H, dist, rng):
        return self._inner(dist).stage_a(prog, lam, G, H, dist, rng)

    def stage_b(self, reg, side, x, G, H, dist, rng):
        return self._inner(dist).stage_b(reg, side, x, G, H, dist, rng)

    def stage_c(self, reg, side, x, G, H, dist, rng):
        return self._inner(dist).stage_c(reg, side, x, G, H, dist, rng)


class BothGuessZero(PiracyStrategy):
    def stage_a(self, prog, lam, G, H, dist, rng):
        return Split()

    def stage_b(self, reg, side, x, G, H, dist, rng):
        return 0

    stage_c = stage_b


class HonestBZeroC(ForwardB):
    """sigma to B, who evaluates honestly; C always outputs 0."""

    def stage_c(self, reg, side, x, G, H, dist, rng):
        return 0


PIRACY_STRATEGIES = {
    "trivial": Trivial,
    "forward-b": ForwardB,
    "forward-c": ForwardC,
    "both-guess-0": BothGuessZero,
    "honest-b-zero-c": HonestBZeroC,
}


def _piracy_trial(rng, index, lam, strategy, dist, transcripts=False):
    strat = PIRACY_STRATEGIES[strategy]()
    y = gf2.random_bits(rng, lam)
    aborts = 0
    while True:
        G, H = schemes.cp_oracles(lam, rng)
        try:
            prog = schemes.cp_protect(y, G, H, rng, lam)
            break
        except LinearDependenceAbort:
            aborts += 1
            if aborts >= MAX_PROTECT_ATTEMPTS:
                raise
    split = strat.stage_a(prog, lam, G, H, dist, rng)
    xb, xc = dist.sample(y, lam, rng)
    B, C = split.open()
    gb = strat.stage_b(B, split.side_b, xb, G, H, dist, rng)
    gc = strat.stage_c(C, split.side_c, xc, G, H, dist, rng)
    win = gb == int(xb == y) and gc == int(xc == y)
    tr = {"y": y, "x_B": xb, "x_C": xc, "b_B": gb, "b_C": gc, "win": win} if transcripts else None
    return TrialResult(win, {"aborts": aborts}, tr)


def run_piracy_point(
    strategy: str,
    lam: int,
    dist: InputDistribution,
    trials: int,
    seed: int,
    threads: int = 1,
    transcripts: bool = False,
) -> GameOutcome:
    """Protected point y is uniform over {0,1}^lam; aborted CopyProtect calls are retried and counted."""
    if strategy not in PIRACY_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(PIRACY_STRATEGIES)}")
    if lam < 1:
        raise ValueError("need lambda >= 1")
    if 2 * lam > 14:
        raise ResourceLimit(f"program register of {2 * lam} qubits exceeds the piracy limit of 14")
    fn = partial(_piracy_trial, lam=lam, strategy=strategy, dist=dist, transcripts=transcripts)
    params = {"strategy": strategy, "inputs": dist.label or f"general:{dist.p},{dist.q},{dist.r}"}
    out = run_trials("piracy", fn, trials, seed, lam, params, threads, transcripts)
    out.stats["p_triv"] = dist.p_triv()
    return out


# correctness of the point-function copy-protection


def _protect_with_retry(y, lam, rng):
    aborts = 0
    while True:
        G, H = schemes.cp_oracles(lam, rng)
        try:
            return G, H, schemes.cp_protect(y, G, H, rng, lam), aborts
        except LinearDependenceAbort:
            aborts += 1
            if aborts >= MAX_PROTECT_ATTEMPTS:
                raise


def _cp_trial(rng, index, lam):
    y = gf2.random_bits(rng, lam)
    G, H, prog, aborts = _protect_with_retry(y, lam, rng)
    on, post = schemes.cp_eval(prog, y, G, H, rng)
    fid = qsim.fidelity_pure(prog.state, post.state)
    x = uniform_except(rng, lam, y)
    try:
        off, _ = schemes.cp_eval(prog, x, G, H, rng)
    except LinearDependenceAbort:
        off = 0
    return on, fid, off, aborts


def run_cp_correctness(lam: int, trials: int, seed: int, threads: int = 1) -> dict:
    """Eval on the protected point and off it, plus CopyProtect abort statistics.

    ``first_try_aborts`` counts trials whose first CopyProtect call aborted;
    its rate estimates the abort probability.
    """
    if lam < 1:
        raise ValueError("need lambda >= 1")
    if 2 * lam > 14:
        raise ResourceLimit(f"program register of {2 * lam} qubits exceeds the limit of 14")
    res = map_trials(partial(_cp_trial, lam=lam), trials, seed, threads)
    on = np.array([r[0] for r in res])
    fid = np.array([r[1] for r in res])
    off = np.array([r[2] for r in res])
    first = np.array([r[3] > 0 for r in res])
    p_abort = schemes.cp_abort_probability(lam)
    return {
        "experiment": "cp-correctness",
        "lambda": lam,
        "trials": trials,
        "seed": seed,
        "accept_on_point": float(on.mean()),
        "min_fidelity": float(fid.min()),
        "accept_off_point": float(off.mean()),
        "first_try_aborts": int(first.sum()),
        "abort_rate": float(first.mean()),
        "abort_closed_form": p_abort,
        "abort_sigma": float(np.sqrt(p_abort * (1 - p_abort) / trials)),
        "total_aborts": int(sum(r[3] for r in res)),
    }
