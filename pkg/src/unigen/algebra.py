"""Lie brackets, bracket closure and the generation test."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DepthExceeded, DimMismatch, EmptyInput, InvalidDims
from .matrix import (
    RANK_TOL,
    STRUCT_TOL,
    GroupKind,
    Structure,
    as_matrix,
    check_algebra,
    detect_structure,
    frozen,
    gram_rank,
    group_for_structure,
    realify,
    unrealify,
)

CLOSURE_TOL = 1e-8
MAX_DEPTH = 16


@dataclass(frozen=True)
class GeneratorSet:
    """Linearly independent algebra elements ``X_1..X_m`` sharing one structure.

    Build instances with :meth:`from_matrices`, which validates structure and
    independence.
    """

    elements: tuple[np.ndarray, ...]
    labels: tuple[str, ...]
    structure: Structure

    @classmethod
    def from_matrices(
        cls,
        mats: Sequence,
        labels: Sequence[str] | None = None,
        structure: Structure | str | None = None,
        *,
        rank_tol: float = RANK_TOL,
        struct_tol: float = STRUCT_TOL,
    ) -> "GeneratorSet":
        if len(mats) == 0:
            raise EmptyInput("a generator set needs at least one element")
        arrs = [as_matrix(m) for m in mats]
        shape = arrs[0].shape
        for a in arrs:
            if a.shape != shape:
                raise DimMismatch(f"generators have differing shapes {shape} and {a.shape}")
        if structure is None:
            kinds = {detect_structure(a, struct_tol) for a in arrs}
            if kinds == {Structure.REAL_ANTISYMMETRIC}:
                structure = Structure.REAL_ANTISYMMETRIC
            elif Structure.GENERAL not in kinds:
                structure = Structure.SKEW_HERMITIAN
            else:
                structure = Structure.GENERAL
        structure = Structure(structure)
        for a in arrs:
            check_algebra(a, structure, struct_tol)
        if structure is Structure.REAL_ANTISYMMETRIC:
            arrs = [np.real(a).astype(np.float64) for a in arrs]
        rank, _ = gram_rank(arrs, rank_tol)
        if rank != len(arrs):
            raise InvalidDims(f"generators are linearly dependent (rank {rank} < {len(arrs)})")
        if labels is None:
            labels = [f"X{i}" for i in range(len(arrs))]
        if len(labels) != len(arrs):
            raise InvalidDims("labels and generators differ in length")
        return cls(tuple(frozen(a) for a in arrs), tuple(str(s) for s in labels), structure)

    @property
    def m(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def group(self) -> GroupKind:
        return group_for_structure(self.structure)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.elements[0])


@dataclass(frozen=True)
class AlgebraBasis:
    """Orthonormal (Frobenius) basis of a bracket-closed subspace."""

    elements: tuple[np.ndarray, ...]

    @property
    def dim_algebra(self) -> int:
        return len(self.elements)


def bracket(X, Y) -> np.ndarray:
    X = as_matrix(X)
    Y = as_matrix(Y)
    if X.shape != Y.shape:
        raise DimMismatch(f"shape mismatch: {X.shape} vs {Y.shape}")
    return X @ Y - Y @ X


def _as_elements(gens) -> list[np.ndarray]:
    if isinstance(gens, (GeneratorSet, AlgebraBasis)):
        return list(gens.elements)
    return [as_matrix(g) for g in gens]


def bracket_closure(
    gens,
    closure_tol: float = CLOSURE_TOL,
    max_depth: int = MAX_DEPTH,
) -> AlgebraBasis:
    """Smallest bracket-closed subspace containing ``gens``, as an orthonormal basis.

    Each sweep brackets every element added in the previous sweep against the
    whole current basis (breadth first, fixed order) and keeps any component
    orthogonal to the span whose norm exceeds ``closure_tol``. Basis elements
    have unit norm, so the tolerance is relative to the largest basis norm.
    """
    if max_depth < 1:
        raise InvalidDims("max_depth must be at least 1")
    mats = _as_elements(gens)
    if not mats:
        raise EmptyInput("bracket_closure needs at least one generator")
    dim = mats[0].shape[0]
    real = not any(np.iscomplexobj(m) for m in mats)
    _, span = gram_rank(mats, RANK_TOL)
    Q = [realify(s) for s in span]
    ambient = dim * dim * (1 if real else 2)

    new = list(range(len(Q)))
    for _ in range(max_depth):
        added: list[int] = []
        for i in new:
            Xi = unrealify(Q[i], dim, real)
            for j in range(len(Q)):
                if j == i:
                    continue
                v = realify(bracket(Xi, unrealify(Q[j], dim, real)))
                for _pass in range(2):
                    for q in Q:
                        v = v - (q @ v) * q
                norm = float(np.linalg.norm(v))
                if norm > closure_tol:
                    Q.append(v / norm)
                    added.append(len(Q) - 1)
                if len(Q) >= ambient:
                    break
        if not added:
            return AlgebraBasis(tuple(frozen(unrealify(q, dim, real)) for q in Q))
        new = added
    raise DepthExceeded(f"bracket closure still growing after {max_depth} sweeps (dim {len(Q)})")


def is_generating(
    gens,
    ambient: AlgebraBasis | int,
    closure_tol: float = CLOSURE_TOL,
    max_depth: int = MAX_DEPTH,
) -> bool:
    expected = ambient.dim_algebra if isinstance(ambient, AlgebraBasis) else int(ambient)
    return bracket_closure(gens, closure_tol, max_depth).dim_algebra == expected


def in_span(X, basis: Sequence, tol: float = 1e-9) -> tuple[bool, np.ndarray, float]:
    """Real least-squares fit of ``X`` against ``basis``.

    Returns ``(inside, coefficients, residual_norm)`` where ``inside`` means
    the residual is at most ``tol * max(1, ||X||_F)``.
    """
    if len(basis) == 0:
        raise EmptyInput("in_span needs a non-empty basis")
    X = as_matrix(X)
    B = np.array([realify(as_matrix(b)) for b in basis]).T
    if B.shape[0] != realify(X).shape[0]:
        raise DimMismatch("basis and element differ in shape")
    x = realify(X)
    coef, *_ = np.linalg.lstsq(B, x, rcond=None)
    residual = float(np.linalg.norm(x - B @ coef))
    inside = residual <= tol * max(1.0, float(np.linalg.norm(x)))
    return inside, coef, residual


def coordinates(X, orthonormal: Sequence[np.ndarray]) -> np.ndarray:
    """Real coordinates of ``X`` against an orthonormal basis."""
    x = realify(X)
    return np.array([realify(q) @ x for q in orthonormal])
