"""Dense complex matrix core.

Validated operator types (projections, density operators) over small
complex matrices, plus the spectral and lattice operations the
consistency and mirror checkers are built on: commutators, the
projection order and join, eigenvalue clustering, and Hermitian
commutant bases.

Values are immutable after construction and every operation is a pure
function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NotHermitian,
    NotIdempotent,
    NotPositive,
    TraceNotOne,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "Projection",
    "DensityOperator",
    "square_matrix",
    "max_norm",
    "validate_projection",
    "validate_density",
    "projector_onto",
    "identity_projection",
    "zero_projection",
    "complement",
    "commutator",
    "is_orthogonal",
    "projection_leq",
    "join",
    "spectral_decomposition",
    "hermitian_basis",
    "commutant_basis",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used by every checker.

    ``op`` bounds operator-identity residuals (Hermiticity, idempotency,
    commutators), ``eig`` classifies eigenvalues and singular values
    (rank decisions, eigenvalue clustering), and ``prob`` bounds
    probability and trace equalities.  ``prob`` must not be tighter
    than ``op``: probability identities accumulate operator error.
    """

    op: float = 1e-10
    eig: float = 1e-8
    prob: float = 1e-9

    def __post_init__(self):
        if not (self.op > 0 and self.eig > 0 and self.prob > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.prob < self.op:
            raise ValueError("prob tolerance must not be tighter than op tolerance")


DEFAULT_TOL = Tolerances()


def square_matrix(entries) -> np.ndarray:
    """Coerce ``entries`` to an immutable complex square matrix (dim >= 1)."""
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    m.setflags(write=False)
    return m


def max_norm(a: np.ndarray) -> float:
    """Entrywise max-norm; the residual measure used throughout."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")


@dataclass(frozen=True, eq=False)
class Projection:
    """A validated orthogonal projection.

    Construct through :func:`validate_projection`.  ``rank`` counts the
    eigenvalues near 1; the two residuals record how well the defining
    identities held at validation time.
    """

    matrix: np.ndarray
    rank: int
    hermiticity_residual: float
    idempotency_residual: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A validated state: Hermitian, positive semidefinite, unit trace."""

    matrix: np.ndarray
    purity: float
    eigenvalue_floor: float
    trace_residual: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_pure(self) -> bool:
        return self.purity >= 1.0 - 1e-9


def validate_projection(entries, tol: Tolerances = DEFAULT_TOL) -> Projection:
    """Check Hermiticity and idempotency and wrap the matrix.

    Raises :class:`NotHermitian` or :class:`NotIdempotent` with the
    offending max-norm residual.
    """
    m = square_matrix(entries)
    herm = max_norm(m - m.conj().T)
    if herm > tol.op:
        raise NotHermitian(
            f"projection candidate is not Hermitian (residual {herm:.3e})", herm)
    idem = max_norm(m @ m - m)
    if idem > tol.op:
        raise NotIdempotent(
            f"projection candidate is not idempotent (residual {idem:.3e})", idem)
    eigs = np.linalg.eigvalsh(m)
    rank = int(np.sum(np.abs(eigs - 1.0) <= tol.eig))
    return Projection(m, rank, herm, idem)


def validate_density(entries, tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    """Check Hermiticity, positivity, and unit trace and wrap the matrix.

    Eigenvalues may dip to ``-tol.eig``; the trace must match 1 within
    ``tol.op``.  Purity and the smallest eigenvalue are recorded.
    """
    m = square_matrix(entries)
    herm = max_norm(m - m.conj().T)
    if herm > tol.op:
        raise NotHermitian(
            f"density candidate is not Hermitian (residual {herm:.3e})", herm)
    floor = float(np.min(np.linalg.eigvalsh(m)))
    if floor < -tol.eig:
        raise NotPositive(
            f"density candidate has eigenvalue {floor:.3e} below -{tol.eig:.1e}",
            -floor)
    tr_res = abs(complex(np.trace(m)) - 1.0)
    if tr_res > tol.op:
        raise TraceNotOne(
            f"density candidate has trace residual {tr_res:.3e}", tr_res)
    purity = float(np.trace(m @ m).real)
    return DensityOperator(m, purity, floor, float(tr_res))


def projector_onto(vector, tol: Tolerances = DEFAULT_TOL) -> Projection:
    """Rank-1 projection onto the span of a nonzero vector."""
    v = np.asarray(vector, dtype=complex).reshape(-1)
    n = float(np.linalg.norm(v))
    if n <= tol.eig:
        raise DimensionMismatch("cannot project onto a (near-)zero vector")
    v = v / n
    return validate_projection(np.outer(v, v.conj()), tol)


def identity_projection(dim: int, tol: Tolerances = DEFAULT_TOL) -> Projection:
    return validate_projection(np.eye(dim, dtype=complex), tol)


def zero_projection(dim: int, tol: Tolerances = DEFAULT_TOL) -> Projection:
    return validate_projection(np.zeros((dim, dim), dtype=complex), tol)


def complement(p: Projection, tol: Tolerances = DEFAULT_TOL) -> Projection:
    """The orthogonal complement ``1 - p``."""
    return validate_projection(np.eye(p.dim, dtype=complex) - p.matrix, tol)


def commutator(a, b) -> np.ndarray:
    """``a @ b - b @ a`` for equal-dimension square matrices."""
    a = square_matrix(a)
    b = square_matrix(b)
    _same_dim(a, b)
    return a @ b - b @ a


def is_orthogonal(p: Projection, q: Projection, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when ``p q = 0`` within ``tol.op`` (max-norm)."""
    _same_dim(p.matrix, q.matrix)
    return max_norm(p.matrix @ q.matrix) <= tol.op


def projection_leq(p: Projection, q: Projection, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when ``p`` is dominated by ``q``, i.e. ``q p = p`` within ``tol.op``."""
    _same_dim(p.matrix, q.matrix)
    return max_norm(q.matrix @ p.matrix - p.matrix) <= tol.op


def join(p: Projection, q: Projection, tol: Tolerances = DEFAULT_TOL) -> Projection:
    """Least projection dominating both: the projection onto ran(p) + ran(q).

    The concatenated columns are orthonormalized by SVD; singular values
    above ``tol.eig`` decide the rank, so the rank decision happens in
    exactly one place.
    """
    _same_dim(p.matrix, q.matrix)
    stacked = np.hstack([p.matrix, q.matrix])
    u, s, _ = np.linalg.svd(stacked)
    r = int(np.sum(s > tol.eig))
    v = u[:, :r]
    return validate_projection(v @ v.conj().T, tol)


def spectral_decomposition(entries, tol: Tolerances = DEFAULT_TOL,
                           ) -> list[tuple[float, Projection]]:
    """Eigenvalue clusters of a Hermitian matrix with their eigenprojections.

    Eigenvalues closer than ``tol.eig`` are merged into one cluster;
    returned pairs ``(mean eigenvalue, projection)`` are in ascending
    eigenvalue order and the projections resolve the identity.
    """
    m = square_matrix(entries)
    herm = max_norm(m - m.conj().T)
    if herm > tol.op:
        raise NotHermitian(
            f"spectral decomposition needs a Hermitian matrix (residual {herm:.3e})",
            herm)
    w, v = np.linalg.eigh(m)
    out: list[tuple[float, Projection]] = []
    start = 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > tol.eig:
            block = v[:, start:i]
            proj = validate_projection(block @ block.conj().T, tol)
            out.append((float(np.mean(w[start:i])), proj))
            start = i
    return out


def hermitian_basis(dim: int) -> list[np.ndarray]:
    """Orthonormal (Hilbert-Schmidt) basis of the Hermitian dim x dim matrices."""
    out: list[np.ndarray] = []
    for i in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[i, i] = 1.0
        out.append(e)
    inv = 1.0 / np.sqrt(2.0)
    for i in range(dim):
        for j in range(i + 1, dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[i, j] = inv
            e[j, i] = inv
            out.append(e)
            f = np.zeros((dim, dim), dtype=complex)
            f[i, j] = -1j * inv
            f[j, i] = 1j * inv
            out.append(f)
    return out


def commutant_basis(generators: Sequence, tol: Tolerances = DEFAULT_TOL,
                    ) -> list[np.ndarray]:
    """Hermitian basis of ``{X : [X, G] = 0 for every generator G}``.

    The commutation constraints are a homogeneous linear system in the
    real coordinates of a Hermitian matrix; its null space is taken by
    SVD with singular-value cutoff ``tol.eig``.  Returned elements are
    Hermitian, Hilbert-Schmidt orthonormal, and each commutes with every
    generator to within ``10 * tol.op``.
    """
    gens = [square_matrix(g) for g in generators]
    if not gens:
        raise DimensionMismatch("need at least one generator")
    d = gens[0].shape[0]
    for g in gens[1:]:
        _same_dim(gens[0], g)
    basis = hermitian_basis(d)
    rows = []
    for g in gens:
        for b in basis:
            c = (b @ g - g @ b).ravel()
            rows.append(np.concatenate([c.real, c.imag]))
    # constraint matrix maps Hermitian-basis coefficients to stacked
    # commutator entries; its null space is the commutant
    a = np.array(rows).reshape(len(gens), len(basis), 2 * d * d)
    a = np.concatenate([blk.T for blk in a], axis=0)
    _, s, vh = np.linalg.svd(a)
    null = [vh[i] for i in range(vh.shape[0])
            if i >= len(s) or s[i] <= tol.eig]
    out = []
    for coeff in null:
        x = sum(c * b for c, b in zip(coeff, basis))
        x = np.asarray(x)
        x.setflags(write=False)
        out.append(x)
    return out
