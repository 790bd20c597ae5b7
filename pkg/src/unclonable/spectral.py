"""Two-projector Jordan decomposition and exact threshold measurements.

For projectors P0, P1 the space splits into mutually orthogonal 1- and
2-dimensional subspaces invariant under both. In a 2-dim block with principal
angle t (c = cos t, s = sin t) there is an orthonormal basis in which

    P0 = [[1, 0], [0, 0]],    P1 = [[c^2, cs], [cs, s^2]].

Blocks are found from the principal vectors of range(P0) and range(P1)
(singular vectors of U0^dag U1); the remainder, where the projectors
commute, is split into 1-dim blocks by simultaneous diagonalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qsim

# eigenvalues and cosines closer than this are treated as equal
CLUSTER_TOL = 1e-8


def _check_projector(P: np.ndarray, name: str):
    if not qsim.is_projector(P):
        raise ValueError(f"{name} is not an orthogonal projector")


def range_basis(P: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the range of a projector."""
    w, V = np.linalg.eigh(P)
    return V[:, w > 0.5]


def random_projector(dim: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    U = qsim.haar_unitary_dim(dim, rng)[:, :rank]
    return U @ U.conj().T


@dataclass
class JordanBlock:
    """An invariant block; ``basis`` has 1 or 2 orthonormal columns.

    For 2-dim blocks column 0 lies in range(P0). ``in0`` / ``in1`` give the
    projector eigenvalues (0 or 1) of a 1-dim block.
    """

    basis: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    angle: float | None = None
    in0: int | None = None
    in1: int | None = None

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass
class JordanDecomposition:
    w: float
    blocks: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def two_dim(self) -> list:
        return [b for b in self.blocks if b.dim == 2]

    def angles(self) -> np.ndarray:
        return np.array([b.angle for b in self.two_dim()])

    def eigenpairs(self) -> tuple[np.ndarray, np.ndarray]:
        """All eigenvalues of w P0 + (1-w) P1 with eigenvectors as columns."""
        vals = np.concatenate([b.eigenvalues for b in self.blocks])
        vecs = np.hstack([b.eigenvectors for b in self.blocks])
        return vals, vecs

    def rows(self) -> list[dict]:
        """One record per block, for tabular output."""
        out = []
        for i, b in enumerate(self.blocks):
            out.append(
                {
                    "block": i,
                    "dim": b.dim,
                    "angle": "" if b.angle is None else f"{b.angle:.12g}",
                    "eigenvalues": " ".join(f"{v:.12g}" for v in b.eigenvalues),
                }
            )
        return out


def _block_from_basis(basis: np.ndarray, P0, P1, w: float, **kw) -> JordanBlock:
    M = w * P0 + (1 - w) * P1
    R = basis.conj().T @ M @ basis
    vals, vecs = np.linalg.eigh((R + R.conj().T) / 2)
    return JordanBlock(basis, vals, basis @ vecs, **kw)


def jordan(P0: np.ndarray, P1: np.ndarray, w: float = 0.5) -> JordanDecomposition:
    _check_projector(P0, "P0")
    _check_projector(P1, "P1")
    if P0.shape != P1.shape:
        raise ValueError(f"shape mismatch {P0.shape} vs {P1.shape}")
    if not 0 <= w <= 1:
        raise ValueError(f"weight {w} outside [0, 1]")
    dim = P0.shape[0]
    U0, U1 = range_basis(P0), range_basis(P1)
    out = JordanDecomposition(w)
    covered = np.zeros((dim, dim), dtype=complex)
    if U0.shape[1] and U1.shape[1]:
        A, cos, Bh = np.linalg.svd(U0.conj().T @ U1)
        for i, c in enumerate(cos):
            if CLUSTER_TOL < c < 1 - CLUSTER_TOL:
                u = U0 @ A[:, i]
                v = U1 @ Bh[i].conj()
                e2 = (v - c * u) / np.sqrt(1 - c * c)
                basis = np.column_stack([u, e2])
                out.blocks.append(_block_from_basis(basis, P0, P1, w, angle=float(np.arccos(min(c, 1.0)))))
                covered += basis @ basis.conj().T
    # the projectors commute on the remainder: label it by (in P0, in P1)
    rest = range_basis(np.eye(dim) - covered) if out.blocks else np.eye(dim, dtype=complex)
    if rest.shape[1]:
        R = rest.conj().T @ (P0 + 2 * P1) @ rest
        vals, vecs = np.linalg.eigh((R + R.conj().T) / 2)
        for val, vec in zip(vals, vecs.T):
            label = int(round(val))
            basis = (rest @ vec)[:, None]
            out.blocks.append(_block_from_basis(basis, P0, P1, w, in0=label & 1, in1=label >> 1))
    return out


def cross_term(phi: np.ndarray, P: np.ndarray, psi: np.ndarray) -> complex:
    """<phi| P |psi>."""
    if phi.shape != psi.shape or P.shape != (phi.shape[0], phi.shape[0]):
        raise ValueError("dimension mismatch")
    return complex(np.vdot(phi, P @ psi))


def three_projector_example() -> tuple[list, np.ndarray, np.ndarray]:
    """Projectors |0><0| x I, I x |0><0|, |+0><+0| and the eigenpairs of their average.

    The two nonzero, non-1/3 eigenvalues are (4 +- sqrt 2)/6; they do not sum
    to one and their eigenvectors have a nonzero cross term under the first
    projector, so the two-projector structure does not extend to three.
    """
    k0 = np.array([1, 0], dtype=complex)
    plus = np.array([1, 1], dtype=complex) * qsim.SQRT1_2
    P = [
        np.kron(np.outer(k0, k0), qsim.I2),
        np.kron(qsim.I2, np.outer(k0, k0)),
        np.outer(np.kron(plus, k0), np.kron(plus, k0)),
    ]
    vals, vecs = np.linalg.eigh(sum(P) / 3)
    return P, vals, vecs


# exact threshold measurements


def _check_povm(P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if P.ndim != 2 or P.shape[0] != P.shape[1] or np.abs(P - P.conj().T).max() > qsim.TOL.operator:
        raise ValueError("P must be a Hermitian matrix")
    vals, vecs = np.linalg.eigh((P + P.conj().T) / 2)
    if vals[0] < -qsim.TOL.operator or vals[-1] > 1 + qsim.TOL.operator:
        raise ValueError("P must satisfy 0 <= P <= I")
    return vals, vecs


@dataclass
class ThresholdMeasurement:
    """Projective pair (E_le, E_gt) on the eigenspaces of P.

    ``one-sided`` splits on eigenvalue > gamma; ``symmetric`` on
    |eigenvalue - 1/2| > gamma.
    """

    P: np.ndarray
    gamma: float
    mode: str = "one-sided"

    def __post_init__(self):
        if self.mode == "one-sided":
            if not 0 < self.gamma < 1:
                raise ValueError(f"one-sided threshold needs gamma in (0, 1), got {self.gamma}")
        elif self.mode == "symmetric":
            if not 0 < self.gamma < 0.5:
                raise ValueError(f"symmetric threshold needs gamma in (0, 1/2), got {self.gamma}")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")
        self._vals, self._vecs = _check_povm(self.P)

    def _above(self) -> np.ndarray:
        score = self._vals if self.mode == "one-sided" else np.abs(self._vals - 0.5)
        return score > self.gamma

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        up = self._vecs[:, self._above()]
        lo = self._vecs[:, ~self._above()]
        return lo @ lo.conj().T, up @ up.conj().T

    def measure(self, psi: np.ndarray, rng: np.random.Generator) -> tuple[int, np.ndarray]:
        """Returns (1 if the > gamma branch occurred, renormalized post-state)."""
        coeff = self._vecs.conj().T @ psi
        up = self._above()
        p_up = float(np.sum(np.abs(coeff[up]) ** 2))
        bit = int(rng.random() < p_up)
        mask = up if bit else ~up
        post = self._vecs[:, mask] @ coeff[mask]
        return bit, post / np.linalg.norm(post)


def threshold_measure(
    P: np.ndarray, psi: np.ndarray, gamma: float, mode: str, rng: np.random.Generator
) -> tuple[int, np.ndarray]:
    return ThresholdMeasurement(P, gamma, mode).measure(psi, rng)


def eigenspaces(P: np.ndarray, tol: float = CLUSTER_TOL) -> list[tuple[float, np.ndarray]]:
    """(eigenvalue, orthonormal basis) per cluster of near-equal eigenvalues."""
    vals, vecs = _check_povm(P)
    out = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > tol:
            out.append((float(np.mean(vals[start:i])), vecs[:, start:i]))
            start = i
    return out


def measurement_branches(P: np.ndarray, rho: np.ndarray) -> list[tuple[float, np.ndarray]]:
    """(p, E_p rho E_p) for each eigenspace E_p of P (unnormalized branches)."""
    out = []
    for p, B in eigenspaces(P):
        E = B @ B.conj().T
        out.append((p, E @ rho @ E))
    return out


def success_probability_measure(P: np.ndarray, psi: np.ndarray, rng: np.random.Generator) -> tuple[float, np.ndarray]:
    """Measure in the eigenbasis of P; returns (eigenvalue p, post-state)."""
    spaces = eigenspaces(P)
    parts = [B @ (B.conj().T @ psi) for _, B in spaces]
    probs = np.array([np.vdot(v, v).real for v in parts])
    i = qsim._sample(probs / probs.sum(), rng)
    return spaces[i][0], parts[i] / np.sqrt(probs[i])
