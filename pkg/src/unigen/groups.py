"""Standard bases, demo generator sets and Haar sampling."""

from __future__ import annotations

import numpy as np

from .algebra import GeneratorSet
from .matrix import Structure

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def su2_basis() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``e_j = -(i/2) sigma_j``, satisfying ``[e_1, e_2] = e_3`` cyclically."""
    return tuple(-0.5j * s for s in PAULI)


def gell_mann() -> list[np.ndarray]:
    lam = [np.zeros((3, 3), dtype=complex) for _ in range(8)]
    lam[0][0, 1] = lam[0][1, 0] = 1
    lam[1][0, 1], lam[1][1, 0] = -1j, 1j
    lam[2][0, 0], lam[2][1, 1] = 1, -1
    lam[3][0, 2] = lam[3][2, 0] = 1
    lam[4][0, 2], lam[4][2, 0] = -1j, 1j
    lam[5][1, 2] = lam[5][2, 1] = 1
    lam[6][1, 2], lam[6][2, 1] = -1j, 1j
    lam[7] = np.diag([1, 1, -2]).astype(complex) / np.sqrt(3)
    return lam


def so3_basis() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    Lx = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float)
    Ly = np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=float)
    Lz = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=float)
    return Lx, Ly, Lz


def so_basis(n: int) -> list[np.ndarray]:
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n))
            E[i, j], E[j, i] = -1.0, 1.0
            out.append(E)
    return out


def su_basis(n: int) -> list[np.ndarray]:
    """Orthogonal (not normalised) basis of ``su(n)``."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j], E[j, i] = 1, -1
            out.append(E)
            F = np.zeros((n, n), dtype=complex)
            F[i, j] = F[j, i] = 1j
            out.append(F)
    for k in range(1, n):
        d = np.zeros(n)
        d[:k] = 1.0
        d[k] = -k
        out.append(np.diag(1j * d / np.sqrt(k * (k + 1))))
    return out


def su2_pauli_pair() -> GeneratorSet:
    e1, e2, _ = su2_basis()
    return GeneratorSet.from_matrices([e1, e2], ["e1", "e2"], Structure.SKEW_HERMITIAN)


def su3_gellmann_pair() -> GeneratorSet:
    lam = gell_mann()
    A = -0.5j * (lam[0] + lam[2] + lam[7])
    B = -0.5j * (lam[1] + lam[3] + lam[5])
    return GeneratorSet.from_matrices([A, B], ["l1+l3+l8", "l2+l4+l6"], Structure.SKEW_HERMITIAN)


def so3_rotations() -> GeneratorSet:
    Lx, Ly, _ = so3_basis()
    return GeneratorSet.from_matrices([Lx, Ly], ["Lx", "Ly"], Structure.REAL_ANTISYMMETRIC)


DEMOS = {
    "su2_pauli_pair": su2_pauli_pair,
    "su3_gellmann_pair": su3_gellmann_pair,
    "so3_rotations": so3_rotations,
}

DEMO_ALGEBRA_DIMS = {"su2_pauli_pair": 3, "su3_gellmann_pair": 8, "so3_rotations": 3}


def random_generic_pair(structure: Structure | str, n: int, rng: np.random.Generator) -> GeneratorSet:
    """Two random algebra elements with unit Frobenius norm."""
    structure = Structure(structure)
    mats = []
    for _ in range(2):
        if structure is Structure.SKEW_HERMITIAN:
            Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            X = 0.5 * (Z - Z.conj().T)
            X -= np.trace(X) / n * np.eye(n)
        else:
            Z = rng.normal(size=(n, n))
            X = 0.5 * (Z - Z.T)
        mats.append(X / np.linalg.norm(X))
    return GeneratorSet.from_matrices(mats, ["A", "B"], structure)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``U(n)`` element: QR of a complex Ginibre matrix, phases fixed."""
    Z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def haar_special_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    U = haar_unitary(n, rng)
    return U / np.linalg.det(U) ** (1.0 / n)


def haar_special_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def haar_sampler(structure: Structure | str, dim: int, dim_algebra: int):
    """Return ``sample(rng)`` for the full group matching the algebra, or None.

    Only ``SU(d)``, ``U(d)`` and ``SO(d)`` are recognised; a proper subgroup
    has no sampler here.
    """
    structure = Structure(structure)
    if structure is Structure.SKEW_HERMITIAN:
        if dim_algebra == dim * dim - 1:
            return lambda rng: haar_special_unitary(dim, rng)
        if dim_algebra == dim * dim:
            return lambda rng: haar_unitary(dim, rng)
    if structure is Structure.REAL_ANTISYMMETRIC and dim_algebra == dim * (dim - 1) // 2:
        return lambda rng: haar_special_orthogonal(dim, rng)
    return None
