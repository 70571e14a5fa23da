"""Quantum channels as Kraus families and their confusability systems."""

from dataclasses import dataclass
from typing import List, Sequence
import itertools
import logging

import numpy as np
import scipy.linalg
from pydantic import BaseModel, Field, model_validator

from config import get_settings
from errors import (
    AmbientMismatchError,
    InvalidChannelError,
    NotProjectionError,
    ShapeMismatchError,
    TooManyKrausError,
    ZeroProjectionError,
)
from graphs import ClassicalChannel, VectorTuple
from numkernel import (
    DEFAULT_TOL,
    CMatrix,
    MatrixPayload,
    Tolerance,
    as_cmatrix,
    dagger,
    orthonormalize,
    random_isometry,
    require_isometry,
    require_unitary,
)
from opsys import OperatorSystem, make_operator_system, projection_range

logger = logging.getLogger(__name__)

TRACE_PRESERVING_TOL = 1e-8
MAX_DELTA_VECTORS = 12


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Channel M_n -> M_k given by Kraus operators of shape (m, k, n)"""

    kraus: np.ndarray

    def __post_init__(self):
        kraus = np.array(self.kraus, dtype=np.complex128)
        if kraus.ndim == 2:
            kraus = kraus[None]
        if kraus.ndim != 3 or kraus.shape[0] < 1:
            raise InvalidChannelError(f"Kraus family must have shape (m, k, n) with m >= 1, got {kraus.shape}")
        total = np.einsum("aki,akj->ij", kraus.conj(), kraus)
        defect = float(np.max(np.abs(total - np.eye(kraus.shape[2]))))
        if defect > TRACE_PRESERVING_TOL:
            raise InvalidChannelError(f"sum of A_i* A_i deviates from the identity by {defect:.3e}")
        kraus.setflags(write=False)
        object.__setattr__(self, "kraus", kraus)

    @property
    def m(self) -> int:
        return self.kraus.shape[0]

    @property
    def k(self) -> int:
        return self.kraus.shape[1]

    @property
    def n(self) -> int:
        return self.kraus.shape[2]

    def apply(self, x: CMatrix) -> CMatrix:
        """X -> sum_i A_i X A_i*"""
        return np.einsum("aki,ij,alj->kl", self.kraus, as_cmatrix(x), self.kraus.conj())

    def to_payload(self) -> "QuantumChannelPayload":
        return QuantumChannelPayload(
            n=self.n, k=self.k, kraus=[MatrixPayload.from_matrix(a) for a in self.kraus]
        )


class QuantumChannelPayload(BaseModel):
    """JSON channel: {"n": int, "k": int, "kraus": [matrix, ...]}"""

    n: int = Field(ge=1)
    k: int = Field(ge=1)
    kraus: List[MatrixPayload] = Field(min_length=1)

    @model_validator(mode="after")
    def _shapes(self) -> "QuantumChannelPayload":
        for a in self.kraus:
            if (a.rows, a.cols) != (self.k, self.n):
                raise ValueError(f"Kraus operator of shape {a.rows}x{a.cols}, expected {self.k}x{self.n}")
        return self

    def to_channel(self) -> QuantumChannel:
        return QuantumChannel(kraus=np.stack([a.to_matrix() for a in self.kraus]))


@dataclass(frozen=True, eq=False)
class ProjectionTuple:
    """Non-zero orthogonal projections P_1..P_n in M_k, shape (n, k, k)"""

    projections: np.ndarray

    def __post_init__(self):
        p = np.array(self.projections, dtype=np.complex128)
        if p.ndim != 3 or p.shape[1] != p.shape[2]:
            raise ShapeMismatchError(f"projections must have shape (n, k, k), got {p.shape}")
        for idx, proj in enumerate(p):
            defect = max(
                float(np.max(np.abs(proj @ proj - proj))),
                float(np.max(np.abs(proj - proj.conj().T))),
            )
            if defect > 1e-10:
                raise NotProjectionError(f"projection {idx} fails P^2 = P = P* by {defect:.3e}")
            if np.trace(proj).real < 0.5:
                raise ZeroProjectionError(f"projection {idx} has rank zero")
        p.setflags(write=False)
        object.__setattr__(self, "projections", p)

    @classmethod
    def from_ranges(cls, ranges: Sequence[CMatrix]) -> "ProjectionTuple":
        """Projections onto the column spaces of matrices with orthonormal columns"""
        return cls(projections=np.stack([r @ dagger(r) for r in map(as_cmatrix, ranges)]))

    @property
    def n(self) -> int:
        return self.projections.shape[0]

    @property
    def k(self) -> int:
        return self.projections.shape[1]

    @property
    def ranks(self) -> List[int]:
        return [int(round(np.trace(p).real)) for p in self.projections]

    def to_payload(self) -> "ProjectionTuplePayload":
        return ProjectionTuplePayload(
            k=self.k, projections=[MatrixPayload.from_matrix(p) for p in self.projections]
        )


class ProjectionTuplePayload(BaseModel):
    k: int = Field(ge=1)
    projections: List[MatrixPayload] = Field(min_length=1)

    def to_projections(self) -> ProjectionTuple:
        return ProjectionTuple(projections=np.stack([p.to_matrix() for p in self.projections]))


def confusability_system(channel: QuantumChannel, tol: Tolerance = DEFAULT_TOL) -> OperatorSystem:
    """S_Phi = span{A_i* A_j}.

    Products are formed from an orthonormal basis of span{A_i}, which spans the
    same system with at most kn operators.
    """
    span = orthonormalize(list(channel.kraus), tol)
    ops = span.basis
    products = np.einsum("aki,bkj->abij", ops.conj(), ops).reshape(-1, channel.n, channel.n)
    return make_operator_system(list(products), n=channel.n, tol=tol)


def from_classical(n_channel: ClassicalChannel) -> QuantumChannel:
    """Canonical quantum channel with Kraus operators sqrt(p(y|x)) E_{y,x}"""
    probs = n_channel.probs
    ops = []
    for y, x in zip(*np.nonzero(probs > 0.0)):
        a = np.zeros((n_channel.outputs, n_channel.inputs), dtype=np.complex128)
        a[y, x] = np.sqrt(probs[y, x])
        ops.append(a)
    return QuantumChannel(kraus=np.stack(ops))


def delta_channel(x: VectorTuple) -> QuantumChannel:
    """Kraus family 2^{-n/2} A D over all sign diagonals D, A = [x_1/|x_1| ... x_n/|x_n|]"""
    if x.n > MAX_DELTA_VECTORS:
        raise TooManyKrausError(f"delta channel on {x.n} vectors needs 2^{x.n} Kraus operators")
    a = x.normalized().T
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=x.n)))
    kraus = a[None, :, :] * signs[:, None, :] * 2.0 ** (-x.n / 2.0)
    return QuantumChannel(kraus=kraus)


def _hermitian_generators(system: OperatorSystem, tol: Tolerance) -> List[CMatrix]:
    """dim(S) - 1 real-orthonormal traceless Hermitian matrices spanning S together with I"""
    n = system.n
    candidates = []
    for b in system.basis:
        for h in (b + dagger(b), 1j * (b - dagger(b))):
            candidates.append(h - np.trace(h).real / n * np.eye(n))
    real_columns = np.stack([np.concatenate([h.real.ravel(), h.imag.ravel()]) for h in candidates], axis=1)
    u, s, _ = scipy.linalg.svd(real_columns, full_matrices=False, lapack_driver="gesvd")
    if s.size == 0 or s[0] == 0.0:
        return []
    rank = int(np.sum(s > tol.rank_rel * s[0]))
    generators = []
    for col in u[:, :rank].T:
        h = (col[: n * n] + 1j * col[n * n:]).reshape(n, n)
        generators.append(0.5 * (h + dagger(h)))
    return generators


def block_count(dim: int) -> int:
    """Smallest m with m(m-1)/2 >= dim - 1"""
    m = 1
    while m * (m - 1) // 2 < dim - 1:
        m += 1
    return m


def realize(system: OperatorSystem, tol: Tolerance = DEFAULT_TOL) -> QuantumChannel:
    """A channel M_n -> M_{mn} whose confusability system is ``system``.

    H has identity diagonal blocks and the Hermitian generators of S in its
    strictly upper blocks. X = (I + eps H) / (m (1 + eps)) keeps the diagonal
    blocks summing to I_n, and the block columns of the Cholesky factor of X are
    the Kraus operators.
    """
    n = system.n
    generators = _hermitian_generators(system, tol)
    if len(generators) != system.dim - 1:
        logger.warning(f"found {len(generators)} Hermitian generators for a system of dimension {system.dim}")
    m = block_count(len(generators) + 1)
    if m == 1:
        return identity_channel(n)

    h = np.zeros((m * n, m * n), dtype=np.complex128)
    for p in range(m):
        h[p * n:(p + 1) * n, p * n:(p + 1) * n] = np.eye(n)
    upper = [(p, q) for p in range(m) for q in range(p + 1, m)]
    for (p, q), g in zip(upper, generators):
        h[p * n:(p + 1) * n, q * n:(q + 1) * n] = g
        h[q * n:(q + 1) * n, p * n:(p + 1) * n] = dagger(g)

    eps = 1.0 / (2.0 * (1.0 + np.linalg.norm(h, 2)))
    x = (np.eye(m * n) + eps * h) / (m * (1.0 + eps))
    c = scipy.linalg.cholesky(0.5 * (x + dagger(x)), lower=False)
    kraus = np.stack([c[:, p * n:(p + 1) * n] for p in range(m)])
    logger.debug(f"realized system of dimension {system.dim} in M_{n} with m = {m}, eps = {eps:.3e}")
    return QuantumChannel(kraus=kraus)


def remix(channel: QuantumChannel, v: CMatrix) -> QuantumChannel:
    """Kraus family B_p = sum_q V_pq A_q for an isometry V of shape m' x m"""
    v = require_isometry(v)
    if v.shape[1] != channel.m:
        raise ShapeMismatchError(f"isometry has {v.shape[1]} columns, channel has {channel.m} Kraus operators")
    return QuantumChannel(kraus=np.einsum("pq,qkn->pkn", v, channel.kraus))


def _kraus_limit() -> int:
    return get_settings().max_kraus


def tensor(phi1: QuantumChannel, phi2: QuantumChannel) -> QuantumChannel:
    """Pairwise Kronecker products of Kraus operators, lexicographic in (i, j)"""
    count = phi1.m * phi2.m
    if count > _kraus_limit():
        raise TooManyKrausError(f"tensor product would have {count} Kraus operators (limit {_kraus_limit()})")
    kraus = np.einsum("aij,bkl->abikjl", phi1.kraus, phi2.kraus).reshape(
        count, phi1.k * phi2.k, phi1.n * phi2.n
    )
    return QuantumChannel(kraus=kraus)


def tensor_power(phi: QuantumChannel, r: int) -> QuantumChannel:
    if r < 1:
        raise ValueError(f"power must be at least 1, got {r}")
    if phi.m ** r > _kraus_limit():
        raise TooManyKrausError(f"tensor power would have {phi.m ** r} Kraus operators (limit {_kraus_limit()})")
    result = phi
    for _ in range(r - 1):
        result = tensor(result, phi)
    return result


def identity_channel(n: int) -> QuantumChannel:
    return QuantumChannel(kraus=np.eye(n, dtype=np.complex128)[None])


def trace_channel(n: int) -> QuantumChannel:
    """M_n -> C with Kraus operators e_1*, ..., e_n*"""
    return QuantumChannel(kraus=np.eye(n, dtype=np.complex128)[:, None, :])


def two_dim_channel() -> QuantumChannel:
    """M_2 -> M_3 channel with non-negative Kraus operators whose confusability system is S_2"""
    a1 = np.array([[1, 0], [0, 0], [0, 1]], dtype=np.complex128) / np.sqrt(2.0)
    a2 = np.array([[0, 0], [0, 1], [1, 0]], dtype=np.complex128) / np.sqrt(2.0)
    return QuantumChannel(kraus=np.stack([a1, a2]))


def conjugate_channel(channel: QuantumChannel, u: CMatrix) -> QuantumChannel:
    """Kraus operators A_i U, with confusability system U* S U"""
    u = require_unitary(u)
    if u.shape[0] != channel.n:
        raise AmbientMismatchError(f"unitary acts on C^{u.shape[0]}, channel input is C^{channel.n}")
    return QuantumChannel(kraus=channel.kraus @ u[None])


def compress_channel(channel: QuantumChannel, p: CMatrix) -> QuantumChannel:
    """Kraus operators A_i V for V an orthonormal basis of range(P)"""
    v = projection_range(p)
    if v.shape[0] != channel.n:
        raise AmbientMismatchError(f"projection acts on C^{v.shape[0]}, channel input is C^{channel.n}")
    return QuantumChannel(kraus=channel.kraus @ v[None])


def direct_sum_channel(phi1: QuantumChannel, phi2: QuantumChannel) -> QuantumChannel:
    """M_{n1+n2} -> M_{k1+k2}; confusability system is the block sum of the two systems"""
    k, n = phi1.k + phi2.k, phi1.n + phi2.n
    kraus = np.zeros((phi1.m + phi2.m, k, n), dtype=np.complex128)
    kraus[: phi1.m, : phi1.k, : phi1.n] = phi1.kraus
    kraus[phi1.m:, phi1.k:, phi1.n:] = phi2.kraus
    return QuantumChannel(kraus=kraus)


def stack_channels(phi1: QuantumChannel, phi2: QuantumChannel) -> QuantumChannel:
    """M_n -> M_{k1+k2} with Kraus operators A_i/sqrt 2 and B_j/sqrt 2 on orthogonal output blocks.

    The confusability system is the span of the two systems.
    """
    if phi1.n != phi2.n:
        raise AmbientMismatchError(f"input dimensions differ: {phi1.n} vs {phi2.n}")
    k = phi1.k + phi2.k
    kraus = np.zeros((phi1.m + phi2.m, k, phi1.n), dtype=np.complex128)
    kraus[: phi1.m, : phi1.k] = phi1.kraus / np.sqrt(2.0)
    kraus[phi1.m:, phi1.k:] = phi2.kraus / np.sqrt(2.0)
    return QuantumChannel(kraus=kraus)


def random_channel(rng: np.random.Generator, n: int, k: int, m: int) -> QuantumChannel:
    """Channel from a Haar-random isometry C^n -> C^{mk}, sliced into m Kraus operators"""
    if m * k < n:
        raise ShapeMismatchError(f"need m*k >= n for an isometry, got m={m}, k={k}, n={n}")
    v = random_isometry(rng, m * k, n)
    return QuantumChannel(kraus=v.reshape(m, k, n))


def kraus_from_factor(factor: CMatrix, n: int) -> QuantumChannel:
    """Slice a row block X = [A_1 ... A_m] (k x mn) into Kraus operators A_i"""
    factor = as_cmatrix(factor)
    if factor.shape[1] % n:
        raise ShapeMismatchError(f"factor width {factor.shape[1]} is not a multiple of {n}")
    m = factor.shape[1] // n
    return QuantumChannel(kraus=np.stack([factor[:, i * n:(i + 1) * n] for i in range(m)]))
