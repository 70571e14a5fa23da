"""Operator systems: unital, adjoint-closed subspaces of M_n."""

from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence
import logging

import numpy as np
import scipy.linalg
from pydantic import BaseModel, Field

from errors import (
    AmbientMismatchError,
    NotOperatorSystemError,
    NotProjectionError,
    ShapeMismatchError,
    ZeroProjectionError,
)
from graphs import Graph
from numkernel import (
    DEFAULT_TOL,
    CMatrix,
    MatrixPayload,
    MatrixSubspace,
    Tolerance,
    as_cmatrix,
    dagger,
    direct_sum,
    full_space,
    orthonormalize,
    perp,
    principal_angle,
    require_unitary,
)

logger = logging.getLogger(__name__)

CLOSURE_TOL = 1e-8
PROJECTION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OperatorSystem:
    """A MatrixSubspace of M_n that contains I_n and is closed under adjoints"""

    space: MatrixSubspace

    def __post_init__(self):
        if not self.space.is_square:
            raise NotOperatorSystemError(
                f"operator systems live in square ambients, got {self.space.rows}x{self.space.cols}"
            )
        identity = np.eye(self.n) / np.sqrt(self.n)
        if self.space.residual(identity) >= CLOSURE_TOL:
            raise NotOperatorSystemError("span does not contain the identity")
        for b in self.space.basis:
            if self.space.residual(b.conj().T) >= CLOSURE_TOL:
                raise NotOperatorSystemError("span is not closed under adjoints")

    @property
    def n(self) -> int:
        return self.space.rows

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> np.ndarray:
        return self.space.basis

    @cached_property
    def perp(self) -> MatrixSubspace:
        return perp(self.space)

    @property
    def is_full(self) -> bool:
        return self.dim == self.n * self.n

    def contains_matrix(self, m: CMatrix, tol: float = CLOSURE_TOL) -> bool:
        return self.space.contains_matrix(m, tol)

    def to_payload(self) -> "OperatorSystemPayload":
        return OperatorSystemPayload(
            n=self.n, basis=[MatrixPayload.from_matrix(b) for b in self.basis]
        )


class OperatorSystemPayload(BaseModel):
    """JSON operator system: {"n": int, "basis": [matrix, ...]}"""

    n: int = Field(ge=1)
    basis: List[MatrixPayload] = Field(default_factory=list)

    def to_system(self, tol: Tolerance = DEFAULT_TOL) -> OperatorSystem:
        return make_operator_system([b.to_matrix() for b in self.basis], n=self.n, tol=tol)


def make_operator_system(
    spanning: Sequence[CMatrix], n: Optional[int] = None, tol: Tolerance = DEFAULT_TOL
) -> OperatorSystem:
    """Smallest operator system containing ``spanning``.

    Adjoints and the identity are adjoined before orthonormalization, so
    non-closed input is repaired rather than rejected. ``n`` is required only
    when ``spanning`` is empty.
    """
    mats = [as_cmatrix(m) for m in spanning]
    if not mats and n is None:
        raise ShapeMismatchError("an empty spanning set needs an explicit ambient dimension")
    size = mats[0].shape[0] if mats else n
    for m in mats:
        if m.shape != (size, size):
            raise ShapeMismatchError(f"expected {size}x{size} matrices, got {m.shape}")
    if n is not None and n != size:
        raise ShapeMismatchError(f"declared n = {n} but matrices are {size}x{size}")

    closure = [np.eye(size, dtype=np.complex128)]
    for m in mats:
        if np.linalg.norm(m) > 0.0:
            closure.append(m)
            closure.append(m.conj().T)
    return OperatorSystem(space=orthonormalize(closure, tol))


def scalar_system(n: int) -> OperatorSystem:
    """C I_n"""
    return make_operator_system([], n=n)


def full_system(n: int) -> OperatorSystem:
    """M_n"""
    return OperatorSystem(space=full_space(n))


def _from_orthonormal(n: int, mats: Sequence[CMatrix]) -> OperatorSystem:
    basis = np.stack(mats, axis=0) if mats else np.zeros((0, n, n), dtype=np.complex128)
    return OperatorSystem(space=MatrixSubspace(rows=n, cols=n, basis=basis))


def graph_system(g: Graph) -> OperatorSystem:
    """S_G = span{E_ij : i = j or i ~ j}"""
    if g.n == 0:
        raise ShapeMismatchError("graph_system needs at least one vertex")
    units = []
    for i in range(g.n):
        for j in range(g.n):
            if g.confusable(i, j):
                e = np.zeros((g.n, g.n), dtype=np.complex128)
                e[i, j] = 1.0
                units.append(e)
    return _from_orthonormal(g.n, units)


def sk_system(k: int) -> OperatorSystem:
    """Matrices in M_k with constant diagonal"""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    mats = [np.eye(k, dtype=np.complex128) / np.sqrt(k)]
    for i in range(k):
        for j in range(k):
            if i != j:
                e = np.zeros((k, k), dtype=np.complex128)
                e[i, j] = 1.0
                mats.append(e)
    return _from_orthonormal(k, mats)


def tensor(s1: OperatorSystem, s2: OperatorSystem) -> OperatorSystem:
    """Span of Kronecker products of the two bases"""
    n = s1.n * s2.n
    products = np.einsum("aij,bkl->abikjl", s1.basis, s2.basis).reshape(s1.dim * s2.dim, n, n)
    return OperatorSystem(space=MatrixSubspace(rows=n, cols=n, basis=products))


def matrix_amplification(s: OperatorSystem, d: int) -> OperatorSystem:
    """M_d(S), realized as S tensor M_d"""
    return tensor(s, full_system(d))


def _left(m: CMatrix, pad: int) -> CMatrix:
    return direct_sum(m, np.zeros((pad, pad)))


def _right(m: CMatrix, pad: int) -> CMatrix:
    return direct_sum(np.zeros((pad, pad)), m)


def _traceless_part(s: OperatorSystem) -> List[CMatrix]:
    return [b - np.trace(b) / s.n * np.eye(s.n) for b in s.basis]


def oplus(s1: OperatorSystem, s2: OperatorSystem, tol: Tolerance = DEFAULT_TOL) -> OperatorSystem:
    """Direct sum in M_{n1+n2} sharing one identity: dimension d1 + d2 - 1.

    Spanned by the block embeddings of the traceless parts of both systems and
    the joint identity I_{n1+n2}.
    """
    size = s1.n + s2.n
    spanning = [np.eye(size, dtype=np.complex128)]
    spanning += [_left(m, s2.n) for m in _traceless_part(s1)]
    spanning += [_right(m, s1.n) for m in _traceless_part(s2)]
    return OperatorSystem(space=orthonormalize(spanning, tol))


def block_sum(s1: OperatorSystem, s2: OperatorSystem) -> OperatorSystem:
    """Block-diagonal direct sum {A + B : A in S1, B in S2}: dimension d1 + d2"""
    size = s1.n + s2.n
    mats = [_left(b, s2.n) for b in s1.basis] + [_right(b, s1.n) for b in s2.basis]
    return _from_orthonormal(size, mats)


def span_union(s1: OperatorSystem, s2: OperatorSystem, tol: Tolerance = DEFAULT_TOL) -> OperatorSystem:
    _require_same_ambient(s1, s2)
    return OperatorSystem(space=orthonormalize(list(s1.basis) + list(s2.basis), tol))


def projection_range(p: CMatrix) -> CMatrix:
    """Orthonormal columns spanning the range of an orthogonal projection"""
    p = as_cmatrix(p)
    if p.shape[0] != p.shape[1]:
        raise NotProjectionError(f"projection must be square, got {p.shape}")
    defect = max(
        float(np.max(np.abs(p @ p - p))),
        float(np.max(np.abs(p - p.conj().T))),
    )
    if defect > PROJECTION_TOL:
        raise NotProjectionError(f"P^2 = P = P* fails by {defect:.3e}")
    eigenvalues, vectors = scipy.linalg.eigh(0.5 * (p + p.conj().T))
    keep = eigenvalues > 0.5
    if not np.any(keep):
        raise ZeroProjectionError("projection has rank zero")
    return vectors[:, keep][:, ::-1]


def compress(s: OperatorSystem, p: CMatrix, tol: Tolerance = DEFAULT_TOL) -> OperatorSystem:
    """P S P restricted to range(P), identified with C^r"""
    v = projection_range(p)
    if v.shape[0] != s.n:
        raise AmbientMismatchError(f"projection acts on C^{v.shape[0]}, system on C^{s.n}")
    compressed = [dagger(v) @ b @ v for b in s.basis]
    return OperatorSystem(space=orthonormalize([np.eye(v.shape[1])] + compressed, tol))


def conjugate(s: OperatorSystem, u: CMatrix) -> OperatorSystem:
    """U* S U"""
    u = require_unitary(u)
    if u.shape[0] != s.n:
        raise AmbientMismatchError(f"unitary acts on C^{u.shape[0]}, system on C^{s.n}")
    return OperatorSystem(
        space=MatrixSubspace(rows=s.n, cols=s.n, basis=dagger(u)[None] @ s.basis @ u[None])
    )


def _require_same_ambient(s1: OperatorSystem, s2: OperatorSystem) -> None:
    if s1.n != s2.n:
        raise AmbientMismatchError(f"ambient dimensions differ: {s1.n} vs {s2.n}")


def angle_between(s1: OperatorSystem, s2: OperatorSystem) -> float:
    _require_same_ambient(s1, s2)
    return principal_angle(s1.space, s2.space)


def equals(s1: OperatorSystem, s2: OperatorSystem, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Equal dimension and largest principal angle below ``tol.subspace_angle``"""
    _require_same_ambient(s1, s2)
    return s1.dim == s2.dim and principal_angle(s1.space, s2.space) < tol.subspace_angle


def contains(s1: OperatorSystem, s2: OperatorSystem, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True when S2 is a subspace of S1"""
    _require_same_ambient(s1, s2)
    return all(s1.space.residual(b) < tol.membership for b in s2.basis)


def complement_span(g: Graph) -> MatrixSubspace:
    """span{E_ij : i != j, i not adjacent to j}, the orthocomplement of S_G"""
    units = []
    for i in range(g.n):
        for j in range(g.n):
            if i != j and not g.adjacent(i, j):
                e = np.zeros((g.n, g.n), dtype=np.complex128)
                e[i, j] = 1.0
                units.append(e)
    basis = np.stack(units) if units else np.zeros((0, g.n, g.n), dtype=np.complex128)
    return MatrixSubspace(rows=g.n, cols=g.n, basis=basis)


def random_operator_system(
    rng: np.random.Generator, n: int, dim: Optional[int] = None, tol: Tolerance = DEFAULT_TOL
) -> OperatorSystem:
    """Operator system generated by random Hermitian matrices.

    ``dim`` (default: uniform in [1, n^2]) is the dimension of the result.
    """
    target = int(rng.integers(1, n * n + 1)) if dim is None else dim
    if not 1 <= target <= n * n:
        raise ValueError(f"dimension must lie in [1, {n * n}], got {target}")
    mats = [np.eye(n, dtype=np.complex128)]
    while len(mats) < target:
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        mats.append(a + a.conj().T)
    return make_operator_system(mats, tol=tol)
