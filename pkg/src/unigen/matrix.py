"""Dense matrix kernels for compact matrix Lie groups.

Everything here is a pure function of numpy arrays. Algebra elements and group
elements are plain square ``ndarray`` values; their structure (skew-Hermitian,
real antisymmetric, unitary, ...) is checked on demand with the ``check_*``
helpers rather than carried in wrapper objects.

Linear-algebra questions about algebra elements are answered over the reals:
``su(n)`` and ``so(n)`` are real vector spaces even when the matrices have
complex entries, so :func:`realify` flattens a matrix into a real vector whose
dot product is the real Frobenius inner product ``Re tr(X^H Y)``.
"""

from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import BranchCut, DimMismatch, EmptyInput, NonFinite, NotInAlgebra, NotInGroup

STRUCT_TOL = 1e-9
GROUP_TOL = 1e-9
RANK_TOL = 1e-9
BRANCH_TOL = 1e-8


class Structure(str, enum.Enum):
    SKEW_HERMITIAN = "skew_hermitian"
    REAL_ANTISYMMETRIC = "real_antisymmetric"
    GENERAL = "general"


class GroupKind(str, enum.Enum):
    UNITARY = "unitary"
    SPECIAL_UNITARY = "special_unitary"
    SPECIAL_ORTHOGONAL = "special_orthogonal"
    GENERAL_LINEAR_COMPONENT = "general_linear_component"


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite square 2-d array (complex unless real input)."""
    m = np.asarray(a)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix contains NaN or Inf entries")
    if np.iscomplexobj(m):
        return m.astype(np.complex128, copy=False)
    return m.astype(np.float64, copy=False)


def frozen(a: np.ndarray) -> np.ndarray:
    """Read-only copy of ``a``; stored values in result objects are immutable."""
    out = np.array(a, copy=True)
    out.setflags(write=False)
    return out


def _same_shape(*mats: np.ndarray) -> None:
    shape = mats[0].shape
    for m in mats[1:]:
        if m.shape != shape:
            raise DimMismatch(f"shape mismatch: {shape} vs {m.shape}")


# --- structure checks -------------------------------------------------------


def structure_defect(X, structure: Structure | str) -> float:
    X = as_matrix(X)
    structure = Structure(structure)
    if structure is Structure.SKEW_HERMITIAN:
        return float(np.linalg.norm(X + X.conj().T))
    if structure is Structure.REAL_ANTISYMMETRIC:
        imag = float(np.linalg.norm(X.imag)) if np.iscomplexobj(X) else 0.0
        return max(imag, float(np.linalg.norm(X + X.T)))
    return 0.0


def check_algebra(X, structure: Structure | str, tol: float = STRUCT_TOL) -> np.ndarray:
    X = as_matrix(X)
    defect = structure_defect(X, structure)
    if defect > tol:
        raise NotInAlgebra(f"element violates {Structure(structure).value} structure by {defect:.3g}")
    return X


def detect_structure(X, tol: float = STRUCT_TOL) -> Structure:
    X = as_matrix(X)
    if structure_defect(X, Structure.REAL_ANTISYMMETRIC) <= tol:
        return Structure.REAL_ANTISYMMETRIC
    if structure_defect(X, Structure.SKEW_HERMITIAN) <= tol:
        return Structure.SKEW_HERMITIAN
    return Structure.GENERAL


def group_defect(K, group: GroupKind | str) -> float:
    K = as_matrix(K)
    group = GroupKind(group)
    if group is GroupKind.GENERAL_LINEAR_COMPONENT:
        return 0.0
    eye = np.eye(K.shape[0])
    defect = float(np.linalg.norm(K.conj().T @ K - eye))
    if group is GroupKind.SPECIAL_ORTHOGONAL and np.iscomplexobj(K):
        defect = max(defect, float(np.linalg.norm(K.imag)))
    if group in (GroupKind.SPECIAL_UNITARY, GroupKind.SPECIAL_ORTHOGONAL):
        defect = max(defect, abs(np.linalg.det(K) - 1.0))
    return defect


def check_group(K, group: GroupKind | str, tol: float = GROUP_TOL) -> np.ndarray:
    K = as_matrix(K)
    defect = group_defect(K, group)
    if defect > tol:
        raise NotInGroup(f"matrix violates {GroupKind(group).value} invariant by {defect:.3g}")
    return K


def group_for_structure(structure: Structure | str) -> GroupKind:
    structure = Structure(structure)
    if structure is Structure.SKEW_HERMITIAN:
        return GroupKind.UNITARY
    if structure is Structure.REAL_ANTISYMMETRIC:
        return GroupKind.SPECIAL_ORTHOGONAL
    return GroupKind.GENERAL_LINEAR_COMPONENT


# --- exponential ------------------------------------------------------------

# Degree-13 diagonal Pade coefficients and the matching norm threshold.
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


def expm(X) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a [13/13] Pade approximant.

    The squaring count is chosen from the 1-norm of ``X`` so the scaled matrix
    lies inside the Pade accuracy region.
    """
    A = as_matrix(X)
    n = A.shape[0]
    norm1 = float(np.linalg.norm(A, 1))
    if norm1 == 0.0:
        return np.eye(n, dtype=A.dtype)
    s = 0
    if norm1 > _THETA13:
        s = max(0, int(math.ceil(math.log2(norm1 / _THETA13))))
        A = A / (2.0 ** s)
    b = _PADE13
    ident = np.eye(n, dtype=A.dtype)
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident
    R = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        R = R @ R
    return R


# --- logarithm --------------------------------------------------------------


def _log_near_identity(A: np.ndarray) -> np.ndarray:
    # log A = 2 atanh(Z), Z = (A - I)(A + I)^{-1}; ||Z|| is about ||A - I|| / 2.
    n = A.shape[0]
    ident = np.eye(n, dtype=A.dtype)
    Z = np.linalg.solve((A + ident).T, (A - ident).T).T
    Z2 = Z @ Z
    term = Z
    total = Z.copy()
    k = 1
    while True:
        term = term @ Z2
        k += 2
        inc = term / k
        total = total + inc
        if np.linalg.norm(inc, 1) <= 1e-18 * max(1.0, np.linalg.norm(total, 1)) or k > 201:
            break
    return 2.0 * total


def logm_principal(
    K,
    group: GroupKind | str = GroupKind.UNITARY,
    *,
    group_tol: float = GROUP_TOL,
    branch_tol: float = BRANCH_TOL,
) -> np.ndarray:
    """Principal matrix logarithm by inverse scaling and squaring.

    Principal square roots are taken until the matrix is within 0.25 of the
    identity in the 1-norm, then an ``atanh`` series finishes the job and the
    result is scaled back up by ``2**s``.

    Raises
    ------
    BranchCut
        If an eigenvalue lies within ``branch_tol`` of the closed negative
        real axis, where the principal branch is undefined.
    NotInGroup
        If ``K`` violates the invariant of ``group``.
    """
    K = check_group(K, group, group_tol)
    group = GroupKind(group)
    eig = np.linalg.eigvals(K)
    on_cut = (eig.real < 0) & (np.abs(eig.imag) <= branch_tol * np.maximum(np.abs(eig), 1.0))
    if np.any(on_cut) or np.any(np.abs(eig) <= branch_tol):
        raise BranchCut("eigenvalue on the negative real axis; principal logarithm undefined")
    real_input = not np.iscomplexobj(K)
    n = K.shape[0]
    ident = np.eye(n)
    A = K.astype(np.complex128)
    s = 0
    while np.linalg.norm(A - ident, 1) > 0.25:
        A = scipy.linalg.sqrtm(A)
        s += 1
        if s > 64:
            raise BranchCut("square-root iteration failed to approach the identity")
    L = _log_near_identity(A) * (2.0 ** s)
    if group is GroupKind.GENERAL_LINEAR_COMPONENT:
        return L.real.copy() if real_input else L
    if real_input or group is GroupKind.SPECIAL_ORTHOGONAL:
        L = L.real
        return 0.5 * (L - L.T)
    return 0.5 * (L - L.conj().T)


# --- conjugation, inner products, rank ---------------------------------------


def group_inverse(K, group: GroupKind | str = GroupKind.UNITARY) -> np.ndarray:
    K = as_matrix(K)
    group = GroupKind(group)
    if group is GroupKind.GENERAL_LINEAR_COMPONENT:
        return np.linalg.inv(K)
    return K.conj().T


def adjoint_conjugate(K, X, group: GroupKind | str = GroupKind.UNITARY) -> np.ndarray:
    """Return ``K X K^{-1}``, with ``K^{-1}`` taken as ``K^H`` on compact groups."""
    K = as_matrix(K)
    X = as_matrix(X)
    _same_shape(K, X)
    return K @ X @ group_inverse(K, group)


def realify(X) -> np.ndarray:
    """Real coordinate vector of ``X`` whose dot product is ``Re tr(X^H Y)``."""
    X = np.asarray(X)
    if np.iscomplexobj(X):
        return np.concatenate([X.real.ravel(), X.imag.ravel()])
    return np.concatenate([X.ravel(), np.zeros(X.size)])


def unrealify(v: np.ndarray, dim: int, real: bool = False) -> np.ndarray:
    half = dim * dim
    M = v[:half].reshape(dim, dim)
    if real:
        return M.copy()
    return M + 1j * v[half:].reshape(dim, dim)


def frobenius_inner(X, Y) -> float:
    X = as_matrix(X)
    Y = as_matrix(Y)
    _same_shape(X, Y)
    return float(np.real(np.vdot(X, Y)))


def gram_rank(vectors: Sequence, rank_tol: float = RANK_TOL) -> tuple[int, list[np.ndarray]]:
    """Numerical rank of a set of matrices over the reals.

    The rank counts singular values of the Gram matrix above
    ``rank_tol * largest``. The returned span is an orthonormal basis built by
    modified Gram-Schmidt (with one re-orthogonalisation pass) and contains
    exactly ``rank`` elements.
    """
    if len(vectors) == 0:
        raise EmptyInput("gram_rank needs at least one element")
    mats = [as_matrix(v) for v in vectors]
    _same_shape(*mats)
    dim = mats[0].shape[0]
    real = not any(np.iscomplexobj(m) for m in mats)
    V = np.array([realify(m) for m in mats])
    gram = V @ V.T
    sv = np.linalg.svd(gram, compute_uv=False)
    if sv[0] == 0.0:
        return 0, []
    rank = int(np.sum(sv > rank_tol * sv[0]))

    # Pivoted MGS: always take the remaining vector with the largest residual,
    # which makes the span independent of input order.
    residuals = V.astype(float).copy()
    basis: list[np.ndarray] = []
    for _ in range(rank):
        norms = np.linalg.norm(residuals, axis=1)
        j = int(np.argmax(norms))
        q = residuals[j] / norms[j]
        for b in basis:
            q = q - (b @ q) * b
        q /= np.linalg.norm(q)
        basis.append(q)
        residuals = residuals - np.outer(residuals @ q, q)
    return rank, [unrealify(q, dim, real) for q in basis]


def group_distance(K1, K2) -> float:
    K1 = as_matrix(K1)
    K2 = as_matrix(K2)
    _same_shape(K1, K2)
    return float(np.linalg.norm(K1 - K2))
