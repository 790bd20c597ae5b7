"""Unclonable IND-CPA, the coset reprogramming game, the strengthened MOE game
and the Haar-split attack on deterministic schemes."""

from __future__ import annotations

from functools import partial

import numpy as np

from .. import cosets, gf2, qsim, rom, schemes
from ..cosets import membership_oracle
from ..schemes import Ciphertext, UEKey
from .harness import GameOutcome, Register, Split, TrialResult, map_trials, run_trials


def _oracle_pair(A, s, sp):
    return membership_oracle(A, s), membership_oracle(gf2.dual(A), sp)


# unclonable IND-CPA


class IndCpaStrategy:
    variants = schemes.VARIANTS

    def __init__(self):
        self.stats: dict = {}

    def messages(self, variant: str, lam: int, bits: int) -> tuple[int, int]:
        return 0, 1

    def stage_a(self, ct: Ciphertext, lam: int, H, rng) -> Split:
        raise NotImplementedError

    def stage_b(self, reg: Register, side: dict, key: UEKey, H, msgs, rng) -> int:
        raise NotImplementedError

    def stage_c(self, reg: Register, side: dict, key: UEKey, H, msgs, rng) -> int:
        raise NotImplementedError


class IndCpaForwardB(IndCpaStrategy):
    """Whole ciphertext to B, who decrypts with the revealed key; C guesses."""

    def stage_a(self, ct, lam, H, rng):
        return Split(ct.quantum, b_qubits=tuple(range(lam)), side_b={"ct": ct})

    def stage_b(self, reg, side, key, H, msgs, rng):
        ct = side["ct"]
        m = schemes.ue_dec(key, Ciphertext(reg.take(), ct.classical, ct.classical_bits), H, rng)
        return int(m != msgs[0])

    def stage_c(self, reg, side, key, H, msgs, rng):
        return int(rng.integers(2))


class IndCpaHalfSplit(IndCpaStrategy):
    """First lam/2 qubits to B, the rest to C, classical part to both.

    Each recovers its half of the message under the revealed key; with
    m0 = 0...0 and m1 = 1...1 either half identifies b.
    """

    variants = ("wiesner", "conjugate")

    def messages(self, variant, lam, bits):
        return 0, (1 << bits) - 1

    def stage_a(self, ct, lam, H, rng):
        h = lam // 2
        side = {"classical": ct.classical}
        return Split(ct.quantum, tuple(range(h)), tuple(range(h, lam)), side, dict(side))

    def _half(self, reg, side, key, offset, rng):
        lam, k = key.lam, len(reg)
        for j in range(k):
            if (key.theta >> (lam - 1 - (offset + j))) & 1:
                reg.apply(qsim.H, [j])
        x = reg.measure(rng)
        pad = side["classical"] if key.variant == "wiesner" else key.r
        return x ^ ((pad >> (lam - offset - k)) & ((1 << k) - 1))

    def stage_b(self, reg, side, key, H, msgs, rng):
        return int(self._half(reg, side, key, 0, rng) != 0)

    def stage_c(self, reg, side, key, H, msgs, rng):
        return int(self._half(reg, side, key, key.lam // 2, rng) != 0)


class IndCpaHaarSplit(IndCpaStrategy):
    """A applies a Haar unitary V and splits the output register in half.

    After the key is revealed each party forms its reduced states of
    V Enc(m0) and V Enc(m1) and applies the Helstrom measurement.
    """

    variants = schemes.DETERMINISTIC
    mixer = qsim.LazyHaarUnitary

    def stage_a(self, ct, lam, H, rng):
        V = self.mixer(lam, rng)
        h = lam // 2
        side = {"V": V}
        return Split(V.apply(ct.quantum), tuple(range(h)), tuple(range(h, lam)), side, side)

    def _guess(self, reg, side, key, msgs, rng, tag):
        V = side["V"]
        phis = [V.apply(schemes.ue_enc(key, m, None).quantum) for m in msgs]
        rhos = [qsim.partial_trace(phi, reg.qubits) for phi in phis]
        self.stats[f"T_{tag}"] = qsim.trace_distance(*rhos)
        return reg.measure_projectors(qsim.helstrom(*rhos), rng)

    def stage_b(self, reg, side, key, H, msgs, rng):
        return self._guess(reg, side, key, msgs, rng, "B")

    def stage_c(self, reg, side, key, H, msgs, rng):
        return self._guess(reg, side, key, msgs, rng, "C")


class IndCpaIdentitySplit(IndCpaHaarSplit):
    """The same split with V = I (harness sanity check)."""

    mixer = qsim.IdentityMixer


IND_CPA_STRATEGIES = {
    "forward-b": IndCpaForwardB,
    "half-split": IndCpaHalfSplit,
    "haar-split": IndCpaHaarSplit,
    "identity-split": IndCpaIdentitySplit,
}


def _ind_cpa_trial(rng, index, variant, lam, strategy, msg_bits, transcripts=False):
    strat = IND_CPA_STRATEGIES[strategy]()
    bits = schemes.message_bits(variant, lam, msg_bits)
    msgs = strat.messages(variant, lam, bits)
    if any(m < 0 or m >> bits for m in msgs):
        raise ValueError(f"challenge messages must both be {bits}-bit strings")
    key = schemes.ue_gen(variant, lam, rng)
    H = schemes.ue_oracle(variant, lam, rng, msg_bits)
    b = int(rng.integers(2))
    ct = schemes.ue_enc(key, msgs[b], H, rng)
    split = strat.stage_a(ct, lam, H, rng)
    B, C = split.open()
    gb = strat.stage_b(B, split.side_b, key, H, msgs, rng)
    gc = strat.stage_c(C, split.side_c, key, H, msgs, rng)
    win = gb == b and gc == b
    tr = {"b": b, "b_B": gb, "b_C": gc, "win": win} if transcripts else None
    return TrialResult(win, dict(strat.stats) or None, tr)


def run_ind_cpa(
    variant: str,
    strategy: str,
    lam: int,
    trials: int,
    seed: int,
    msg_bits: int = 1,
    threads: int = 1,
    transcripts: bool = False,
) -> GameOutcome:
    if strategy not in IND_CPA_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(IND_CPA_STRATEGIES)}")
    if variant not in IND_CPA_STRATEGIES[strategy].variants:
        raise ValueError(f"strategy {strategy!r} does not apply to variant {variant!r}")
    if strategy in ("half-split", "haar-split", "identity-split") and (lam < 2 or lam % 2):
        raise ValueError(f"{strategy} needs even lambda >= 2")
    if variant == "coset" and lam % 2:
        raise ValueError("coset variant needs even lambda")
    if strategy in ("haar-split", "identity-split") and lam > qsim.MAX_QUBITS:
        raise qsim.ResourceLimit(f"lambda {lam} exceeds {qsim.MAX_QUBITS} qubits")
    fn = partial(
        _ind_cpa_trial, variant=variant, lam=lam, strategy=strategy, msg_bits=msg_bits, transcripts=transcripts
    )
    params = {"variant": variant, "strategy": strategy, "msg_bits": schemes.message_bits(variant, lam, msg_bits)}
    return run_trials("ind-cpa", fn, trials, seed, lam, params, threads, transcripts)


def run_deterministic_attack(
    variant: str, lam: int, trials: int, seed: int, mixing: str = "haar", threads: int = 1
) -> GameOutcome:
    """IND-CPA with m0 = 0...0, m1 = 0...01 against a deterministic scheme.

    Stats report the mean trace distances T_B, T_C of the reduced states.
    """
    if variant not in schemes.DETERMINISTIC:
        raise ValueError(f"{variant!r} is not a deterministic variant")
    if lam > 12:
        raise qsim.ResourceLimit(f"lambda {lam} exceeds the attack limit of 12")
    strategy = {"haar": "haar-split", "identity": "identity-split"}.get(mixing)
    if strategy is None:
        raise ValueError(f"unknown mixing {mixing!r}")
    out = run_ind_cpa(variant, strategy, lam, trials, seed, threads=threads)
    out.game = "haar-attack"
    out.params["mixing"] = mixing
    return out


def _haar_sample(rng, index, qubits):
    a, b = qsim.haar_state(qubits, rng), qsim.haar_state(qubits, rng)
    keep = list(range(qubits // 2))
    return qsim.trace_distance(qsim.partial_trace(a, keep), qsim.partial_trace(b, keep))


HAAR_LIMIT = 0.25 + 1 / np.pi


def run_haar_statistic(qubits: int, samples: int, seed: int, threads: int = 1) -> dict:
    """T(Tr_C psi1, Tr_C psi2) for Haar psi1, psi2 on ``qubits`` qubits, B = first half."""
    if qubits < 2 or qubits % 2:
        raise ValueError("need an even number of qubits >= 2")
    if qubits > qsim.MAX_QUBITS:
        raise qsim.ResourceLimit(f"{qubits} qubits exceeds the dense limit")
    vals = np.array(map_trials(partial(_haar_sample, qubits=qubits), samples, seed, threads))
    return {
        "experiment": "haar-statistic",
        "qubits": qubits,
        "samples": samples,
        "seed": seed,
        "mean": float(vals.mean()),
        "sd": float(vals.std(ddof=1)) if samples > 1 else 0.0,
        "limit": HAAR_LIMIT,
    }


# reprogramming game


class ReprogramStrategy:
    def stage_a(self, psi, value, lam, H, oracles, rng) -> Split:
        raise NotImplementedError

    def stage_b(self, reg, side, A, H_b, oracles, rng) -> int:
        raise NotImplementedError

    def stage_c(self, reg, side, A, H_c, oracles, rng) -> int:
        raise NotImplementedError


def _decode_compare(reg, side, A, oracle, rng) -> int:
    s, sp, _ = cosets.decode(reg.take(), A, rng)
    return int(oracle((s << A.n) | sp) != side["value"])


class ReprogramDecodeCompare(ReprogramStrategy):
    """B decodes (s, s'), queries its oracle there and compares with H(s, s'); C guesses."""

    def stage_a(self, psi, value, lam, H, oracles, rng):
        return Split(psi, b_qubits=tuple(range(lam)), side_b={"value": value})

    def stage_b(self, reg, side, A, H_b, oracles, rng):
        return _decode_compare(reg, side, A, H_b, rng)

    def stage_c(self, reg, side, A, H_c, oracles, rng):
        return int(rng.integers(2))


class ReprogramBothRandom(ReprogramStrategy):
    """A draws one coin and hands it to both B and C."""

    def stage_a(self, psi, value, lam, H, oracles, rng):
        c = int(rng.integers(2))
        return Split(side_b={"coin": c}, side_c={"coin": c})

    def stage_b(self, reg, side, A, H_b, oracles, rng):
        return side["coin"]

    stage_c = stage_b


class ReprogramBothRandomUnshared(ReprogramStrategy):
    def stage_a(self, psi, value, lam, H, oracles, rng):
        return Split()

    def stage_b(self, reg, side, A, H_b, oracles, rng):
        return int(rng.integers(2))

    stage_c = stage_b


REPROGRAM_STRATEGIES = {
    "decode-compare": ReprogramDecodeCompare,
    "both-random": ReprogramBothRandom,
    "both-random-unshared": ReprogramBothRandomUnshared,
}
REPROGRAM_MODES = ("identical", "independent")
REPROGRAM_WIRINGS = ("punctured", "true")


def _reprogram_trial(rng, index, lam, mode, strategy, wiring, transcripts=False):
    strat = REPROGRAM_STRATEGIES[strategy]()
    A = gf2.sample_subspace(lam, lam // 2, rng)
    p = cosets.CosetStateParams.random(A, rng)
    psi = cosets.prepare(A, p.s, p.sp, check=False)
    H = rom.new_oracle(2 * lam, 1, rng)
    point = (p.s << lam) | p.sp
    value = H(point)
    H_a = H.reprogram(point, int(rng.integers(2))) if wiring == "punctured" else H
    split = strat.stage_a(psi, value, lam, H_a, _oracle_pair(A, p.s, p.sp), rng)
    H_flip = H.reprogram(point, rom.flip)
    b1 = int(rng.integers(2))
    b2 = b1 if mode == "identical" else int(rng.integers(2))
    B, C = split.open()
    gb = strat.stage_b(B, split.side_b, A, (H, H_flip)[b1], _oracle_pair(A, p.s, p.sp), rng)
    gc = strat.stage_c(C, split.side_c, A, (H, H_flip)[b2], _oracle_pair(A, p.s, p.sp), rng)
    win = gb == b1 and gc == b2
    tr = {"b_1": b1, "b_2": b2, "b_B": gb, "b_C": gc, "win": win} if transcripts else None
    return TrialResult(win, None, tr)


def run_reprogram_game(
    mode: str,
    strategy: str,
    lam: int,
    trials: int,
    seed: int,
    wiring: str = "punctured",
    threads: int = 1,
    transcripts: bool = False,
) -> GameOutcome:
    """``wiring`` picks A's oracle: H with (s, s') punctured to a fresh value, or H itself."""
    if mode not in REPROGRAM_MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {REPROGRAM_MODES}")
    if wiring not in REPROGRAM_WIRINGS:
        raise ValueError(f"unknown wiring {wiring!r}; choose from {REPROGRAM_WIRINGS}")
    if strategy not in REPROGRAM_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(REPROGRAM_STRATEGIES)}")
    if lam < 2 or lam % 2:
        raise ValueError(f"reprogram game needs even lambda >= 2, got {lam}")
    if 2 * lam > rom.MAX_COHERENT_BITS:
        raise qsim.ResourceLimit(f"oracle domain 2^{2 * lam} too large for coherent access")
    fn = partial(_reprogram_trial, lam=lam, mode=mode, strategy=strategy, wiring=wiring, transcripts=transcripts)
    params = {"mode": mode, "strategy": strategy, "wiring": wiring}
    return run_trials("reprogram", fn, trials, seed, lam, params, threads, transcripts)


# strengthened MOE game


class StrengthenedStrategy:
    def delta(self, n_bits: int, rng) -> int:
        return (1 << n_bits) - 1

    def stage_a(self, psi, w, lam, H, oracles, rng) -> Split:
        raise NotImplementedError

    def stage_b(self, reg, side, A, H, oracles, rng) -> int:
        raise NotImplementedError

    def stage_c(self, reg, side, A, H, oracles, rng) -> int:
        raise NotImplementedError


class StrengthenedForwardB(StrengthenedStrategy):
    """State and w to B, who decodes (s, s') and checks w against H(s, s'); C guesses."""

    def stage_a(self, psi, w, lam, H, oracles, rng):
        return Split(psi, b_qubits=tuple(range(lam)), side_b={"value": w})

    def stage_b(self, reg, side, A, H, oracles, rng):
        return _decode_compare(reg, side, A, H, rng)

    def stage_c(self, reg, side, A, H, oracles, rng):
        return int(rng.integers(2))


class StrengthenedDeltaZero(StrengthenedForwardB):
    """Forward-to-B with Delta = 0, so w carries no information about b."""

    def delta(self, n_bits, rng):
        return 0


class StrengthenedBothRandom(StrengthenedStrategy):
    def stage_a(self, psi, w, lam, H, oracles, rng):
        return Split()

    def stage_b(self, reg, side, A, H, oracles, rng):
        return int(rng.integers(2))

    stage_c = stage_b


STRENGTHENED_STRATEGIES = {
    "forward-b": StrengthenedForwardB,
    "delta-zero": StrengthenedDeltaZero,
    "both-random": StrengthenedBothRandom,
}


def _strengthened_trial(rng, index, lam, n_bits, strategy, transcripts=False):
    strat = STRENGTHENED_STRATEGIES[strategy]()
    delta = strat.delta(n_bits, rng)
    if delta < 0 or delta >> n_bits:
        raise ValueError(f"Delta must be an {n_bits}-bit string")
    A = gf2.sample_subspace(lam, lam // 2, rng)
    p = cosets.CosetStateParams.random(A, rng)
    psi = cosets.prepare(A, p.s, p.sp, check=False)
    H = rom.new_oracle(2 * lam, n_bits, rng)
    b = int(rng.integers(2))
    w = H((p.s << lam) | p.sp) ^ (b * delta)
    split = strat.stage_a(psi, w, lam, H, _oracle_pair(A, p.s, p.sp), rng)
    B, C = split.open()
    gb = strat.stage_b(B, split.side_b, A, H, _oracle_pair(A, p.s, p.sp), rng)
    gc = strat.stage_c(C, split.side_c, A, H, _oracle_pair(A, p.s, p.sp), rng)
    win = gb == b and gc == b
    tr = {"b": b, "delta": delta, "b_B": gb, "b_C": gc, "win": win} if transcripts else None
    return TrialResult(win, None, tr)


def run_strengthened_moe(
    strategy: str, lam: int, n_bits: int, trials: int, seed: int, threads: int = 1, transcripts: bool = False
) -> GameOutcome:
    if strategy not in STRENGTHENED_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {sorted(STRENGTHENED_STRATEGIES)}")
    if lam < 2 or lam % 2:
        raise ValueError(f"strengthened MOE needs even lambda >= 2, got {lam}")
    if 2 * lam > rom.MAX_COHERENT_BITS:
        raise qsim.ResourceLimit(f"oracle domain 2^{2 * lam} too large for coherent access")
    if n_bits < 1:
        raise ValueError("need n_bits >= 1")
    fn = partial(_strengthened_trial, lam=lam, n_bits=n_bits, strategy=strategy, transcripts=transcripts)
    params = {"strategy": strategy, "n_bits": n_bits}
    return run_trials("strengthened-moe", fn, trials, seed, lam, params, threads, transcripts)
