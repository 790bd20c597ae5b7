"""Dense state-vector and density-matrix simulation.

States are numpy complex arrays. A pure state on k qubits has shape (2**k,);
qubit 0 is the most significant bit of the amplitude index, matching the
packing used in :mod:`unclonable.gf2`. Routines that act on a register may also
receive an array of shape (2**k, R): the extra axis is an environment (other
parties' qubits) that is carried along untouched. Density matrices are square
(2**k, 2**k) arrays and are only accepted where documented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass
class Tolerances:
    state: float = 1e-10
    operator: float = 1e-9


TOL = Tolerances()

# dense pure states above this many qubits are refused
MAX_QUBITS = 16
# Haar unitaries / density matrices above this many qubits are refused
MAX_OPERATOR_QUBITS = 12


class ResourceLimit(RuntimeError):
    pass


SQRT1_2 = 1 / np.sqrt(2)
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2


def num_qubits(psi: np.ndarray) -> int:
    dim = psi.shape[0]
    k = dim.bit_length() - 1
    if dim != 1 << k:
        raise ValueError(f"leading dimension {dim} is not a power of two")
    return k


def basis_state(k: int, index: int = 0) -> np.ndarray:
    if k > MAX_QUBITS:
        raise ResourceLimit(f"{k} qubits exceeds the dense limit of {MAX_QUBITS}")
    psi = np.zeros(1 << k, dtype=complex)
    psi[index] = 1.0
    return psi


def norm(psi: np.ndarray) -> float:
    return float(np.sqrt(np.vdot(psi, psi).real))


def normalize(psi: np.ndarray) -> np.ndarray:
    n = norm(psi)
    if n < TOL.state:
        raise ValueError("cannot normalize a zero vector")
    return psi / n


def _check_targets(targets: Sequence[int], k: int) -> list[int]:
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate target qubits {targets}")
    for t in targets:
        if not 0 <= t < k:
            raise IndexError(f"qubit {t} out of range for {k} qubits")
    return targets


def apply(U: np.ndarray, psi: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Apply U to the listed qubits (first listed = most significant of U)."""
    k = num_qubits(psi)
    targets = _check_targets(targets, k)
    t = len(targets)
    if U.shape != (1 << t, 1 << t):
        raise ValueError(f"operator of shape {U.shape} does not act on {t} qubits")
    if t == k and targets == list(range(k)):
        return U @ psi
    rest = psi.shape[1:]
    tensor = psi.reshape((2,) * k + rest)
    Ut = U.reshape((2,) * (2 * t))
    out = np.tensordot(Ut, tensor, axes=(list(range(t, 2 * t)), targets))
    out = np.moveaxis(out, list(range(t)), targets)
    return out.reshape(psi.shape)


def hadamard_all(psi: np.ndarray) -> np.ndarray:
    """H on every qubit (fast Walsh-Hadamard transform along axis 0)."""
    k = num_qubits(psi)
    rest = psi.shape[1:]
    out = np.array(psi, dtype=complex)
    for q in range(k):
        view = out.reshape((1 << q, 2, -1))
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = a + b
        view[:, 1, :] = a - b
    out *= 2.0 ** (-k / 2)
    return out.reshape((1 << k,) + rest)


def hadamard_matrix(k: int) -> np.ndarray:
    return hadamard_all(np.eye(1 << k, dtype=complex))


def density(psi: np.ndarray) -> np.ndarray:
    """|psi><psi|, tracing out any environment axis."""
    M = psi.reshape(psi.shape[0], -1)
    return M @ M.conj().T


def _group(psi: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reshape a state so rows index the kept qubits and columns everything else."""
    k = num_qubits(psi)
    keep = _check_targets(keep, k)
    if not keep:
        raise ValueError("keep_qubits must be nonempty")
    tensor = psi.reshape((2,) * k + (-1,))
    others = [q for q in range(k) if q not in keep]
    tensor = np.transpose(tensor, keep + others + [k])
    return tensor.reshape(1 << len(keep), -1)


def partial_trace(x: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on ``keep`` (in listed order).

    ``x`` is a state vector (1-D) or a density matrix (square 2-D).
    """
    if x.ndim == 1:
        M = _group(x, keep)
        return M @ M.conj().T
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError("expected a state vector or a square density matrix")
    k = num_qubits(x)
    keep = _check_targets(keep, k)
    if not keep:
        raise ValueError("keep_qubits must be nonempty")
    others = [q for q in range(k) if q not in keep]
    tensor = x.reshape((2,) * (2 * k))
    perm = keep + others + [k + q for q in keep] + [k + q for q in others]
    tensor = np.transpose(tensor, perm)
    dk, do = 1 << len(keep), 1 << len(others)
    return np.einsum("ajbj->ab", tensor.reshape(dk, do, dk, do))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the trace norm of rho - sigma."""
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    diff = rho - sigma
    diff = (diff + diff.conj().T) / 2
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def pure_trace_distance(psi: np.ndarray, phi: np.ndarray) -> float:
    """Trace distance between two pure states, sqrt(1 - |<psi|phi>|^2)."""
    overlap = abs(np.vdot(psi.ravel(), phi.ravel())) ** 2
    return float(np.sqrt(max(0.0, 1.0 - overlap)))


def fidelity_pure(psi: np.ndarray, phi: np.ndarray) -> float:
    return float(abs(np.vdot(psi.ravel(), phi.ravel())) ** 2)


def haar_state(k: int, rng: np.random.Generator) -> np.ndarray:
    if k < 1:
        raise ValueError("need k >= 1")
    if k > MAX_QUBITS:
        raise ResourceLimit(f"{k} qubits exceeds the dense limit of {MAX_QUBITS}")
    dim = 1 << k
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def haar_unitary_dim(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    # fix the phase freedom of QR so the distribution is exactly Haar
    return q * (d / np.abs(d))


def haar_unitary(k: int, rng: np.random.Generator) -> np.ndarray:
    if k < 1:
        raise ValueError("need k >= 1")
    if k > MAX_OPERATOR_QUBITS:
        raise ResourceLimit(f"{k}-qubit unitary exceeds the limit of {MAX_OPERATOR_QUBITS}")
    return haar_unitary_dim(1 << k, rng)


class LazyHaarUnitary:
    """A Haar unitary on k qubits sampled only where it is used.

    Keeps orthonormal inputs e_i with images f_i. A new vector is split into
    its part in span(e) and a residual; the residual direction is sent to a
    fresh Haar-random unit vector orthogonal to all f_i. Conditioned on the
    images so far this is exactly the Haar conditional law, so the map is a
    Haar unitary observed on a few vectors, at O(dim) cost per new direction.
    """

    def __init__(self, k: int, rng: np.random.Generator):
        if k > MAX_QUBITS:
            raise ResourceLimit(f"{k} qubits exceeds the dense limit of {MAX_QUBITS}")
        self.k = k
        self.dim = 1 << k
        self.rng = rng
        self._in = np.zeros((self.dim, 0), dtype=complex)
        self._out = np.zeros((self.dim, 0), dtype=complex)

    def _fresh_image(self) -> np.ndarray:
        z = self.rng.standard_normal(self.dim) + 1j * self.rng.standard_normal(self.dim)
        for _ in range(2):
            z = z - self._out @ (self._out.conj().T @ z)
        return z / np.linalg.norm(z)

    def apply(self, phi: np.ndarray) -> np.ndarray:
        phi = np.asarray(phi, dtype=complex)
        if phi.shape != (self.dim,):
            raise ValueError(f"expected a vector of length {self.dim}")
        coeff = self._in.conj().T @ phi
        res = phi - self._in @ coeff
        # second Gram-Schmidt pass for numerical orthogonality
        c2 = self._in.conj().T @ res
        res, coeff = res - self._in @ c2, coeff + c2
        r = np.linalg.norm(res)
        out = self._out @ coeff
        if r > TOL.state * max(1.0, np.linalg.norm(phi)):
            e, f = res / r, self._fresh_image()
            self._in = np.column_stack([self._in, e])
            self._out = np.column_stack([self._out, f])
            out = out + r * f
        return out


class IdentityMixer:
    """Stand-in for LazyHaarUnitary that applies no mixing."""

    def __init__(self, k: int, rng: np.random.Generator | None = None):
        self.k = k

    def apply(self, phi: np.ndarray) -> np.ndarray:
        return np.asarray(phi, dtype=complex)


def apply_xor_function(
    psi: np.ndarray, table: np.ndarray, in_qubits: Sequence[int], out_qubits: Sequence[int]
) -> np.ndarray:
    """|x>|y> -> |x>|y xor f(x)> with f given as a lookup table over 2^m inputs.

    The map is a permutation of basis states, so it is applied by index
    shuffling rather than by building a matrix.
    """
    k = num_qubits(psi)
    in_qubits = _check_targets(in_qubits, k)
    out_qubits = _check_targets(out_qubits, k)
    if set(in_qubits) & set(out_qubits):
        raise ValueError("input and output registers overlap")
    m, t = len(in_qubits), len(out_qubits)
    table = np.asarray(table, dtype=np.int64)
    if table.shape != (1 << m,):
        raise ValueError(f"table of shape {table.shape} does not match {m} input qubits")
    if t < 63 and np.any(table >> t):
        raise ValueError(f"function values exceed {t} output bits")
    rest = psi.shape[1:]
    others = [q for q in range(k) if q not in in_qubits and q not in out_qubits]
    perm = in_qubits + out_qubits + others + [k]
    grouped = np.transpose(psi.reshape((2,) * k + (-1,)), perm).reshape(1 << m, 1 << t, -1)
    ys = np.arange(1 << t, dtype=np.int64)[None, :] ^ table[:, None]
    out = np.empty_like(grouped)
    np.put_along_axis(out, ys[:, :, None], grouped, axis=1)
    out = out.reshape((2,) * k + (-1,))
    out = np.transpose(out, np.argsort(perm))
    return out.reshape((1 << k,) + rest)


def measure_function(psi: np.ndarray, values: np.ndarray, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Measure a classical function of the full computational register.

    Equivalent to computing f(x) into a fresh ancilla, measuring the ancilla
    and uncomputing: the state is projected onto the level set {x : f(x) = c}.
    """
    M = psi.reshape(psi.shape[0], -1)
    weights = np.einsum("ij,ij->i", M.real, M.real) + np.einsum("ij,ij->i", M.imag, M.imag)
    values = np.asarray(values, dtype=np.int64)
    probs = np.bincount(values, weights=weights)
    c = _sample(probs, rng)
    mask = values == c
    post = np.where(mask[:, None], M, 0) / np.sqrt(probs[c])
    return c, post.reshape(psi.shape)


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(probs)
    i = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(i, len(probs) - 1)


def measure(psi: np.ndarray, qubits: Sequence[int], rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Computational-basis measurement of ``qubits``.

    Returns the outcome as an integer (first listed qubit most significant)
    and the renormalized post-measurement state of the same shape.
    """
    k = num_qubits(psi)
    qubits = _check_targets(qubits, k)
    if not qubits:
        return 0, psi
    rest = psi.shape[1:]
    others = [q for q in range(k) if q not in qubits]
    tensor = psi.reshape((2,) * k + (-1,))
    perm = qubits + others + [k]
    grouped = np.transpose(tensor, perm).reshape(1 << len(qubits), -1)
    probs = np.einsum("ij,ij->i", grouped.real, grouped.real) + np.einsum(
        "ij,ij->i", grouped.imag, grouped.imag
    )
    outcome = _sample(probs, rng)
    p = probs[outcome]
    if p <= 0:
        raise ValueError("sampled a zero-probability branch")
    post = np.zeros_like(grouped)
    post[outcome] = grouped[outcome] / np.sqrt(p)
    post = post.reshape((2,) * k + (-1,))
    post = np.transpose(post, np.argsort(perm))
    return outcome, post.reshape((1 << k,) + rest)


def measure_computational(psi: np.ndarray, qubits: Sequence[int], rng: np.random.Generator) -> tuple[str, np.ndarray]:
    """Like :func:`measure` but the outcome is a bitstring."""
    outcome, post = measure(psi, qubits, rng)
    return format(outcome, f"0{len(qubits)}b") if len(qubits) else "", post


def measure_projectors(
    psi: np.ndarray, projectors: Sequence[np.ndarray], targets: Sequence[int], rng: np.random.Generator
) -> tuple[int, np.ndarray]:
    """Projective measurement {P_j} on ``targets``; returns (j, post-state)."""
    branches = [apply(P, psi, targets) for P in projectors]
    probs = np.array([np.vdot(b, b).real for b in branches])
    j = _sample(probs, rng)
    return j, branches[j] / np.sqrt(probs[j])


def helstrom(rho0: np.ndarray, rho1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Optimal equal-prior measurement (guess-0, guess-1) for rho0 vs rho1."""
    if rho0.shape != rho1.shape:
        raise ValueError(f"shape mismatch {rho0.shape} vs {rho1.shape}")
    diff = rho0 - rho1
    w, v = np.linalg.eigh((diff + diff.conj().T) / 2)
    pos = v[:, w >= 0]
    P0 = pos @ pos.conj().T
    return P0, np.eye(len(w), dtype=complex) - P0


def helstrom_success(rho0: np.ndarray, rho1: np.ndarray) -> float:
    """Success probability of the Helstrom measurement on equal priors."""
    P0, P1 = helstrom(rho0, rho1)
    return float(0.5 * (np.trace(P0 @ rho0).real + np.trace(P1 @ rho1).real))


def is_state(psi: np.ndarray, tol: float | None = None) -> bool:
    tol = TOL.state if tol is None else tol
    return abs(np.vdot(psi, psi).real - 1) <= tol


def is_density(rho: np.ndarray, tol: float | None = None) -> bool:
    tol = TOL.operator if tol is None else tol
    if not np.allclose(rho, rho.conj().T, atol=tol):
        return False
    if abs(np.trace(rho).real - 1) > tol:
        return False
    return np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() > -tol


def is_unitary(U: np.ndarray, tol: float | None = None) -> bool:
    tol = TOL.operator if tol is None else tol
    return np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])) <= tol


def is_projector(P: np.ndarray, tol: float | None = None) -> bool:
    tol = TOL.operator if tol is None else tol
    return np.linalg.norm(P @ P - P) <= tol and np.linalg.norm(P - P.conj().T) <= tol


def projector_onto(vectors: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the column span of ``vectors``."""
    vectors = np.atleast_2d(vectors)
    if vectors.shape[1] == 0:
        return np.zeros((vectors.shape[0], vectors.shape[0]), dtype=complex)
    u, sv, _ = np.linalg.svd(vectors, full_matrices=False)
    u = u[:, sv > TOL.operator * max(1.0, sv.max())]
    return u @ u.conj().T


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out
