"""Dense complex linear algebra with an explicit tolerance policy.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Subspaces of
``M_{r,c}`` carry a Hilbert-Schmidt orthonormal basis; since
``tr(Y*X) = vdot(Y.ravel(), X.ravel())`` every subspace computation reduces to
ordinary column-space linear algebra on flattened matrices.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import Settings, get_settings
from errors import (
    AllZeroInputError,
    NonSquareAmbientError,
    NotHermitianError,
    NotIsometryError,
    NotUnitaryError,
    ShapeMismatchError,
)

logger = logging.getLogger(__name__)

CMatrix = np.ndarray

# Spanning sets whose every member is below this norm are rejected outright.
ZERO_NORM = 1e-14
HERMITIAN_REL = 1e-12
ORTHO_TOL = 1e-10


class Tolerance(BaseModel):
    """Tolerance policy shared by every rank, PSD and subspace decision"""

    model_config = ConfigDict(frozen=True)

    rank_rel: float = Field(default=1e-8, description="Relative singular value cutoff")
    psd_abs: float = Field(default=1e-8, description="PSD eigenvalue slack")
    subspace_angle: float = Field(default=1e-8, description="Principal angle for equality")
    membership: float = Field(default=1e-8, description="Projection residual for membership")
    block_zero_rel: float = Field(default=1e-7, description="Zero-block cutoff relative to the Gram norm")

    @field_validator("rank_rel", "psd_abs", "subspace_angle", "membership", "block_zero_rel")
    @classmethod
    def _in_range(cls, value: float) -> float:
        if not (0.0 < value < 1e-2):
            raise ValueError(f"tolerance must lie in (0, 1e-2), got {value}")
        return value

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None) -> "Tolerance":
        settings = settings or get_settings()
        return cls(
            rank_rel=settings.rank_rel,
            psd_abs=settings.psd_abs,
            subspace_angle=settings.subspace_angle,
            membership=settings.membership_tol,
            block_zero_rel=settings.block_zero_rel,
        )


DEFAULT_TOL = Tolerance()


def as_cmatrix(value) -> CMatrix:
    """Coerce ``value`` to a 2-D complex array"""
    m = np.asarray(value, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1:
        m = m.reshape(-1, 1)
    elif m.ndim != 2:
        raise ShapeMismatchError(f"expected a matrix, got array of shape {m.shape}")
    return m


def dagger(m: CMatrix) -> CMatrix:
    return np.conj(np.swapaxes(m, -1, -2))


def hermitian_part(m: CMatrix) -> CMatrix:
    return 0.5 * (m + dagger(m))


def matrix_unit(n: int, i: int, j: int, cols: Optional[int] = None) -> CMatrix:
    e = np.zeros((n, n if cols is None else cols), dtype=np.complex128)
    e[i, j] = 1.0
    return e


@dataclass(frozen=True, eq=False)
class MatrixSubspace:
    """Subspace of M_{rows,cols} with a Hilbert-Schmidt orthonormal basis.

    ``basis`` has shape ``(dim, rows, cols)``; ``dim`` may be zero.
    """

    rows: int
    cols: int
    basis: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=np.complex128)
        if basis.ndim != 3 or basis.shape[1:] != (self.rows, self.cols):
            raise ShapeMismatchError(
                f"basis shape {basis.shape} does not match ambient {self.rows}x{self.cols}"
            )
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def columns(self) -> np.ndarray:
        """Flattened basis as the columns of a (rows*cols) x dim matrix"""
        return self.basis.reshape(self.dim, -1).T

    def coordinates(self, m: CMatrix) -> np.ndarray:
        return self.columns.conj().T @ np.asarray(m, dtype=np.complex128).ravel()

    def project(self, m: CMatrix) -> CMatrix:
        """Orthogonal projection of ``m`` onto the subspace"""
        if self.dim == 0:
            return np.zeros((self.rows, self.cols), dtype=np.complex128)
        flat = self.columns @ self.coordinates(m)
        return flat.reshape(self.rows, self.cols)

    def residual(self, m: CMatrix) -> float:
        """Frobenius distance from ``m`` to the subspace"""
        m = np.asarray(m, dtype=np.complex128)
        return float(np.linalg.norm(m - self.project(m)))

    def contains_matrix(self, m: CMatrix, tol: float = 1e-8) -> bool:
        m = np.asarray(m, dtype=np.complex128)
        return self.residual(m) < tol * max(1.0, float(np.linalg.norm(m)))

    def gram_defect(self) -> float:
        """Largest deviation of the basis Gram matrix from the identity"""
        if self.dim == 0:
            return 0.0
        q = self.columns
        return float(np.max(np.abs(q.conj().T @ q - np.eye(self.dim))))


def orthonormalize(spanning: Sequence[CMatrix], tol: Tolerance = DEFAULT_TOL) -> MatrixSubspace:
    """Orthonormal basis of the span of ``spanning``.

    Singular values below ``tol.rank_rel`` times the largest are discarded.
    """
    mats = [np.asarray(m, dtype=np.complex128) for m in spanning]
    if not mats:
        raise AllZeroInputError("cannot orthonormalize an empty spanning set")
    shape = mats[0].shape
    if len(shape) != 2 or any(m.shape != shape for m in mats):
        raise ShapeMismatchError(f"spanning matrices disagree in shape: {sorted({m.shape for m in mats})}")
    stack = np.stack([m.ravel() for m in mats], axis=1)
    if np.max(np.linalg.norm(stack, axis=0)) < ZERO_NORM:
        raise AllZeroInputError("every spanning matrix is numerically zero")

    u, s, _ = scipy.linalg.svd(stack, full_matrices=False, lapack_driver="gesvd")
    r = int(np.sum(s > tol.rank_rel * s[0]))
    basis = u[:, :r].T.reshape(r, *shape)
    return MatrixSubspace(rows=shape[0], cols=shape[1], basis=basis)


def zero_subspace(rows: int, cols: Optional[int] = None) -> MatrixSubspace:
    cols = rows if cols is None else cols
    return MatrixSubspace(rows=rows, cols=cols, basis=np.zeros((0, rows, cols), dtype=np.complex128))


def full_space(rows: int, cols: Optional[int] = None) -> MatrixSubspace:
    cols = rows if cols is None else cols
    basis = np.eye(rows * cols, dtype=np.complex128).reshape(rows * cols, rows, cols)
    return MatrixSubspace(rows=rows, cols=cols, basis=basis)


def perp(space: MatrixSubspace) -> MatrixSubspace:
    """Hilbert-Schmidt orthogonal complement within a square ambient"""
    if not space.is_square:
        raise NonSquareAmbientError(f"perp needs a square ambient, got {space.rows}x{space.cols}")
    n, total = space.rows, space.rows * space.cols
    if space.dim == 0:
        return full_space(n)
    if space.dim >= total:
        return zero_subspace(n)
    u, _, _ = scipy.linalg.svd(space.columns, full_matrices=True, lapack_driver="gesvd")
    complement = u[:, space.dim:]
    return MatrixSubspace(rows=n, cols=n, basis=complement.T.reshape(total - space.dim, n, n))


def principal_angle(a: MatrixSubspace, b: MatrixSubspace) -> float:
    """Largest principal angle between two subspaces of one ambient.

    Subspaces of different dimension are reported at pi/2.
    """
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ShapeMismatchError(f"ambient mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}")
    if a.dim != b.dim:
        return math.pi / 2
    if a.dim == 0:
        return 0.0
    qa, qb = a.columns, b.columns
    cross = qa.conj().T @ qb
    cos_min = float(np.min(scipy.linalg.svdvals(cross)))
    # sine of the largest angle via the residual, accurate for tiny angles
    sin_max = float(np.linalg.norm(qb - qa @ cross, 2))
    return float(np.arctan2(sin_max, max(cos_min, 0.0)))


def numerical_rank(m: CMatrix, tol: Tolerance = DEFAULT_TOL) -> int:
    m = np.asarray(m, dtype=np.complex128)
    if m.size == 0:
        return 0
    s = scipy.linalg.svdvals(m)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


@dataclass(frozen=True)
class PsdReport:
    """Outcome of a PSD test together with the spectrum extremes"""

    is_psd: bool
    min_eigenvalue: float
    spectral_radius: float

    def __bool__(self) -> bool:
        return self.is_psd


def check_hermitian(m: CMatrix, rel: float = HERMITIAN_REL) -> None:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquareAmbientError(f"expected a square matrix, got shape {m.shape}")
    scale = 1.0 + (float(np.max(np.abs(m))) if m.size else 0.0)
    defect = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if defect > rel * scale:
        raise NotHermitianError(f"matrix deviates from its adjoint by {defect:.3e}")


def is_psd(m: CMatrix, tol: Tolerance = DEFAULT_TOL) -> PsdReport:
    """PSD test: lambda_min >= -psd_abs * (1 + spectral radius)"""
    check_hermitian(m)
    eigenvalues = scipy.linalg.eigvalsh(hermitian_part(np.asarray(m, dtype=np.complex128)))
    lam_min = float(eigenvalues[0])
    radius = float(np.max(np.abs(eigenvalues)))
    return PsdReport(
        is_psd=lam_min >= -tol.psd_abs * (1.0 + radius),
        min_eigenvalue=lam_min,
        spectral_radius=radius,
    )


def kron(a: CMatrix, b: CMatrix) -> CMatrix:
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def direct_sum(a: CMatrix, b: CMatrix) -> CMatrix:
    return scipy.linalg.block_diag(as_cmatrix(a), as_cmatrix(b)).astype(np.complex128)


def isometry_defect(v: CMatrix) -> float:
    v = np.asarray(v, dtype=np.complex128)
    return float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))))


def require_isometry(v: CMatrix, tol: float = ORTHO_TOL) -> CMatrix:
    v = as_cmatrix(v)
    defect = isometry_defect(v)
    if defect > tol:
        raise NotIsometryError(f"V*V deviates from the identity by {defect:.3e}")
    return v


def require_unitary(u: CMatrix, tol: float = ORTHO_TOL) -> CMatrix:
    u = as_cmatrix(u)
    if u.shape[0] != u.shape[1]:
        raise NotUnitaryError(f"unitary must be square, got shape {u.shape}")
    defect = isometry_defect(u)
    if defect > tol:
        raise NotUnitaryError(f"U*U deviates from the identity by {defect:.3e}")
    return u


def random_complex(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_isometry(rng: np.random.Generator, rows: int, cols: int) -> CMatrix:
    """Haar-distributed isometry in M_{rows,cols}, rows >= cols"""
    if cols > rows:
        raise ShapeMismatchError(f"an isometry needs rows >= cols, got {rows}x{cols}")
    q, r = scipy.linalg.qr(random_complex(rng, rows, cols), mode="economic")
    phases = np.diag(r) / np.where(np.abs(np.diag(r)) > 0, np.abs(np.diag(r)), 1.0)
    return q * phases


def random_unitary(rng: np.random.Generator, n: int) -> CMatrix:
    return random_isometry(rng, n, n)


def orth_columns(m: CMatrix, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """Orthonormal basis of the column space of ``m`` as columns"""
    m = as_cmatrix(m)
    if not m.size or np.max(np.abs(m)) == 0.0:
        return np.zeros((m.shape[0], 0), dtype=np.complex128)
    return scipy.linalg.orth(m, rcond=tol.rank_rel)


# ---------------------------------------------------------------------------
# JSON payloads
# ---------------------------------------------------------------------------


class MatrixPayload(BaseModel):
    """JSON matrix: {"rows", "cols", "entries": [[re, im], ...]} in row-major order"""

    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    entries: List[Tuple[float, float]]

    @field_validator("entries")
    @classmethod
    def _finite(cls, entries: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        for re, im in entries:
            if not (math.isfinite(re) and math.isfinite(im)):
                raise ValueError("matrix entries must be finite (NaN/Inf rejected)")
        return entries

    @model_validator(mode="after")
    def _length(self) -> "MatrixPayload":
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"entries has length {len(self.entries)}, expected rows*cols = {self.rows * self.cols}"
            )
        return self

    @classmethod
    def from_matrix(cls, m: CMatrix) -> "MatrixPayload":
        m = as_cmatrix(m)
        flat = m.ravel()
        return cls(
            rows=m.shape[0],
            cols=m.shape[1],
            entries=[(float(z.real), float(z.imag)) for z in flat],
        )

    def to_matrix(self) -> CMatrix:
        data = np.array(self.entries, dtype=np.float64).reshape(self.rows * self.cols, 2)
        return (data[:, 0] + 1j * data[:, 1]).reshape(self.rows, self.cols)


class SubspacePayload(BaseModel):
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    basis: List[MatrixPayload]

    @classmethod
    def from_subspace(cls, space: MatrixSubspace) -> "SubspacePayload":
        return cls(
            rows=space.rows,
            cols=space.cols,
            basis=[MatrixPayload.from_matrix(b) for b in space.basis],
        )

    def to_subspace(self, tol: Tolerance = DEFAULT_TOL) -> MatrixSubspace:
        mats = [b.to_matrix() for b in self.basis]
        if any(m.shape != (self.rows, self.cols) for m in mats):
            raise ShapeMismatchError("basis matrix shape disagrees with the declared ambient")
        if not mats:
            return zero_subspace(self.rows, self.cols)
        return orthonormalize(mats, tol)
