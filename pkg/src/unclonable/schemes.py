"""Unclonable encryption variants and copy-protection for point functions.

Variants
--------
coset      key A (dim lam/2 in F_2^lam); ciphertext (|A_{s,s'}>, H(s||s') xor m)
bl         key (alpha, theta); ciphertext (|x^theta>, H(alpha||x) xor m)
wiesner    one-time pad with Wiesner states: key theta; ciphertext (|x^theta>, x xor m)
conjugate  deterministic: key (r, theta); ciphertext |(m xor r)^theta>, no classical part
qubit0     deterministic sanity scheme with an empty key: |m> with the last message
           bit moved to qubit 0 (used to exercise the Haar attack harness)
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import cosets, gf2, qsim, rom
from .gf2 import GF2Subspace

VARIANTS = ("coset", "bl", "wiesner", "conjugate", "qubit0")
DETERMINISTIC = ("conjugate", "qubit0")


class LinearDependenceAbort(RuntimeError):
    """G(y) parsed into linearly dependent vectors; the construction aborts."""


# single-qubit |x^theta> indexed by 2 * theta + x
_BB84 = np.array(
    [[1, 0], [0, 1], [qsim.SQRT1_2, qsim.SQRT1_2], [qsim.SQRT1_2, -qsim.SQRT1_2]],
    dtype=complex,
)


def wiesner_state(x: int, theta: int, lam: int) -> np.ndarray:
    """|x^theta>: bit i of x in the computational (theta_i=0) or Hadamard basis."""
    out = np.ones(1, dtype=complex)
    for i in range(lam):
        sh = lam - 1 - i
        v = _BB84[2 * ((theta >> sh) & 1) + ((x >> sh) & 1)]
        out = (out[:, None] * v[None, :]).ravel()
    return out


def hadamard_on(theta: int, lam: int) -> np.ndarray:
    """The unitary H^{theta_1} x ... x H^{theta_lam}."""
    return qsim.kron_all([qsim.H if (theta >> (lam - 1 - i)) & 1 else qsim.I2 for i in range(lam)])


def undo_wiesner(psi: np.ndarray, theta: int, lam: int) -> np.ndarray:
    for i in range(lam):
        if (theta >> (lam - 1 - i)) & 1:
            psi = qsim.apply(qsim.H, psi, [i])
    return psi


# keys and ciphertexts


@dataclass(frozen=True)
class UEKey:
    variant: str
    lam: int
    A: GF2Subspace | None = None
    alpha: int = 0
    theta: int = 0
    r: int = 0

    def to_json(self) -> str:
        d = {"variant": self.variant, "lambda": self.lam}
        if self.variant == "coset":
            d["A"] = [gf2.to_bits(v, self.lam) for v in self.A.basis]
        if self.variant == "bl":
            d["alpha"] = gf2.to_bits(self.alpha, self.lam)
        if self.variant in ("bl", "wiesner", "conjugate"):
            d["theta"] = gf2.to_bits(self.theta, self.lam)
        if self.variant == "conjugate":
            d["r"] = gf2.to_bits(self.r, self.lam)
        return json.dumps(d, sort_keys=True)


@dataclass
class Ciphertext:
    quantum: np.ndarray
    classical: int = 0
    classical_bits: int = 0

    def classical_text(self) -> str:
        return gf2.to_bits(self.classical, self.classical_bits)


def message_bits(variant: str, lam: int, msg_bits: int = 1) -> int:
    """Message length of a variant (the oracle-based ones take ``msg_bits``)."""
    if variant in ("coset", "bl"):
        return msg_bits
    if variant in ("wiesner", "conjugate", "qubit0"):
        return lam
    raise ValueError(f"unknown variant {variant!r}")


def ue_oracle(variant: str, lam: int, rng: np.random.Generator, msg_bits: int = 1) -> rom.OracleTable | None:
    """The random oracle a variant uses, or None."""
    if variant in ("coset", "bl"):
        return rom.new_oracle(2 * lam, msg_bits, rng)
    return None


def ue_gen(variant: str, lam: int, rng: np.random.Generator) -> UEKey:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if lam < 1:
        raise ValueError("need lambda >= 1")
    if variant == "coset":
        if lam % 2:
            raise ValueError(f"coset variant needs even lambda, got {lam}")
        return UEKey(variant, lam, A=gf2.sample_subspace(lam, lam // 2, rng))
    if variant == "bl":
        return UEKey(variant, lam, alpha=gf2.random_bits(rng, lam), theta=gf2.random_bits(rng, lam))
    if variant == "wiesner":
        return UEKey(variant, lam, theta=gf2.random_bits(rng, lam))
    if variant == "conjugate":
        return UEKey(variant, lam, r=gf2.random_bits(rng, lam), theta=gf2.random_bits(rng, lam))
    return UEKey(variant, lam)


def _check_msg(m: int, bits: int):
    if m < 0 or m >> bits:
        raise ValueError(f"message {m} does not fit in {bits} bits")


def _rotate_last_to_front(m: int, lam: int) -> int:
    return ((m & 1) << (lam - 1)) | (m >> 1)


def ue_enc(
    key: UEKey, m: int, H: rom.OracleTable | None, rng: np.random.Generator | None = None, msg_bits: int | None = None
) -> Ciphertext:
    lam, v = key.lam, key.variant
    if v in ("coset", "bl"):
        if H is None:
            raise ValueError(f"{v} variant needs a random oracle")
        _check_msg(m, H.k)
        if v == "coset":
            p = cosets.CosetStateParams.random(key.A, rng)
            psi = cosets.prepare(key.A, p.s, p.sp, check=False)
            return Ciphertext(psi, H((p.s << lam) | p.sp) ^ m, H.k)
        x = gf2.random_bits(rng, lam)
        return Ciphertext(wiesner_state(x, key.theta, lam), H((key.alpha << lam) | x) ^ m, H.k)
    _check_msg(m, lam)
    if v == "wiesner":
        x = gf2.random_bits(rng, lam)
        return Ciphertext(wiesner_state(x, key.theta, lam), x ^ m, lam)
    if v == "conjugate":
        return Ciphertext(wiesner_state(m ^ key.r, key.theta, lam))
    return Ciphertext(qsim.basis_state(lam, _rotate_last_to_front(m, lam)))


def ue_dec(key: UEKey, ct: Ciphertext, H: rom.OracleTable | None, rng: np.random.Generator | None = None) -> int:
    """Honest decryption; measurements are deterministic on honest ciphertexts."""
    lam, v = key.lam, key.variant
    rng = rng if rng is not None else np.random.default_rng()
    if qsim.num_qubits(ct.quantum) != lam:
        raise gf2.DimensionMismatch(f"ciphertext has {qsim.num_qubits(ct.quantum)} qubits, expected {lam}")
    if v == "coset":
        s, sp, _ = cosets.decode(ct.quantum, key.A, rng)
        return ct.classical ^ H((s << lam) | sp)
    if v == "qubit0":
        x, _ = qsim.measure(ct.quantum, range(lam), rng)
        return ((x << 1) & ((1 << lam) - 1)) | (x >> (lam - 1))
    psi = undo_wiesner(ct.quantum, key.theta, lam)
    x, _ = qsim.measure(psi, range(lam), rng)
    if v == "bl":
        return ct.classical ^ H((key.alpha << lam) | x)
    if v == "wiesner":
        return ct.classical ^ x
    return x ^ key.r


def deterministic_unitary(key: UEKey) -> np.ndarray:
    """U_sk with Enc(m) = U_sk |m> for the deterministic variants."""
    lam = key.lam
    if key.variant == "conjugate":
        X = qsim.kron_all([qsim.X if (key.r >> (lam - 1 - i)) & 1 else qsim.I2 for i in range(lam)])
        return hadamard_on(key.theta, lam) @ X
    if key.variant == "qubit0":
        dim = 1 << lam
        U = np.zeros((dim, dim), dtype=complex)
        U[[_rotate_last_to_front(m, lam) for m in range(dim)], np.arange(dim)] = 1
        return U
    raise ValueError(f"{key.variant} is not a deterministic variant")


# copy-protection for point functions


@dataclass(frozen=True)
class PointFunctionParams:
    lam: int

    @property
    def n(self) -> int:
        return 2 * self.lam

    @property
    def d(self) -> int:
        return self.lam

    @property
    def tag_bits(self) -> int:
        return 4 * self.n + self.lam


@dataclass
class CPProgram:
    """Copy-protected program: coset state on register X and tag H(s||s') on Y."""

    state: np.ndarray
    tag: int
    lam: int

    @property
    def tag_bits(self) -> int:
        return PointFunctionParams(self.lam).tag_bits


def cp_oracles(lam: int, rng: np.random.Generator) -> tuple[rom.OracleTable, rom.OracleTable]:
    """(G, H) with G: {0,1}^lam -> {0,1}^{n d}, H: {0,1}^{2n} -> {0,1}^{4n+lam}."""
    p = PointFunctionParams(lam)
    return rom.new_oracle(lam, p.n * p.d, rng), rom.new_oracle(2 * p.n, p.tag_bits, rng)


def parse_subspace(v: int, n: int, d: int) -> GF2Subspace:
    """Split v into v_1 || ... || v_d (v_1 most significant) and take the span."""
    vecs = [(v >> (n * (d - 1 - i))) & ((1 << n) - 1) for i in range(d)]
    A = gf2.rref(vecs, n)
    if A.dim != d:
        raise LinearDependenceAbort(f"G output spans only {A.dim} of {d} dimensions")
    return A


def cp_subspace(y: int, G: rom.OracleTable, lam: int) -> GF2Subspace:
    p = PointFunctionParams(lam)
    _check_msg(y, lam)
    return parse_subspace(G(y), p.n, p.d)


def cp_protect(y: int, G: rom.OracleTable, H: rom.OracleTable, rng: np.random.Generator, lam: int) -> CPProgram:
    A = cp_subspace(y, G, lam)
    c = cosets.CosetStateParams.random(A, rng)
    n = A.n
    return CPProgram(cosets.prepare(A, c.s, c.sp, check=False), H((c.s << n) | c.sp), lam)


def cp_eval(
    prog: CPProgram, x: int, G: rom.OracleTable, H: rom.OracleTable, rng: np.random.Generator
) -> tuple[int, CPProgram]:
    """Evaluate f_y(x) and return the residual program.

    Extracting (t, t') coherently against A' = span G(x), hashing and measuring
    the hash register collapses X onto |A'_{t,t'}>; this is simulated by a
    coset-basis measurement of X followed by a classical H query. The
    extraction and hash registers are discarded. On x = y the state is
    returned unchanged.
    """
    A = cp_subspace(x, G, prog.lam)
    t, tp, post = cosets.decode(prog.state, A, rng)
    theta = H((t << A.n) | tp)
    return int(theta == prog.tag), CPProgram(post, prog.tag, prog.lam)


def cp_abort_probability(lam: int) -> float:
    """Probability that d uniform vectors in F_2^n are dependent."""
    p = PointFunctionParams(lam)
    ok = 1.0
    for i in range(1, p.d + 1):
        ok *= 1 - 2.0 ** (i - 1 - p.n)
    return 1 - ok
