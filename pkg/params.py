"""Certified bounds for alpha, beta, gamma and the intersection numbers.

Every positive search result is re-verified before it becomes a certificate;
searches that fail return ``NotFound`` carrying the budget they used, which is
never a proof of absence unless ``exact`` is set.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union
import logging
import math

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from channels import (
    ProjectionTuple,
    ProjectionTuplePayload,
    QuantumChannel,
    QuantumChannelPayload,
    confusability_system,
    delta_channel,
    from_classical,
    identity_channel,
    kraus_from_factor,
    random_channel,
    realize,
    trace_channel,
    two_dim_channel,
)
from channels import conjugate_channel, direct_sum_channel, tensor as tensor_channel
from config import get_settings
from errors import (
    AmbientMismatchError,
    BlockSizeMismatchError,
    BlockTooSmallError,
    DegenerateABoundsError,
    NotInFError,
    NotInHError,
    NotPSDError,
    ShapeMismatchError,
    UnsupportedCertificateError,
    VertexCountMismatchError,
)
from graphs import (
    Graph,
    VectorTuple,
    VectorTuplePayload,
    channel_from_sets,
    complement,
    complement_coloring_vectors,
    intersection_number,
    maximum_independent_set,
    non_orthogonality_graph,
    non_orthogonality_graph_proj,
)
from numkernel import (
    DEFAULT_TOL,
    CMatrix,
    MatrixPayload,
    MatrixSubspace,
    Tolerance,
    as_cmatrix,
    check_hermitian,
    dagger,
    hermitian_part,
    is_psd,
    numerical_rank,
    orth_columns,
    perp,
    random_complex,
    random_isometry,
)
from opsys import (
    OperatorSystem,
    angle_between,
    block_sum,
    conjugate,
    contains,
    equals,
    graph_system,
    tensor as tensor_system,
)

logger = logging.getLogger(__name__)

ParameterName = Literal["alpha", "beta", "gamma", "inter", "qinter"]
DirectionName = Literal["lower", "upper"]
WitnessKind = Literal["vectors", "projections", "channel", "gram", "theta", "none"]

MEMBERSHIP_TOL = 1e-8
NONCANCELLING_ANGLE = 1e-8
RANK_ONE_RATIO = 1e-7
SEARCH_OBJECTIVE_TARGET = 1e-24
EPSILON_HALVINGS = 60


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


class ParamCertificate(BaseModel):
    """A verified bound on one parameter together with its witness"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    parameter: ParameterName
    direction: DirectionName
    value: int
    witness_kind: WitnessKind
    witness: Any = None
    seed: Optional[int] = None
    verified: bool = False
    notes: List[str] = Field(default_factory=list)

    def to_payload(self) -> Dict[str, Any]:
        witness = None
        if self.witness is not None and hasattr(self.witness, "to_payload"):
            witness = self.witness.to_payload().model_dump()
        return {
            "parameter": self.parameter,
            "direction": self.direction,
            "value": self.value,
            "witness_kind": self.witness_kind,
            "witness": witness,
            "seed": self.seed,
            "verified": self.verified,
            "notes": list(self.notes),
        }

    @classmethod
    def from_payload(cls, payload: Dict[str, Any]) -> "ParamCertificate":
        kind = payload.get("witness_kind", "none")
        raw = payload.get("witness")
        witness: Any = None
        if raw is not None:
            if kind == "vectors":
                witness = VectorTuplePayload.model_validate(raw).to_vectors()
            elif kind == "projections":
                witness = ProjectionTuplePayload.model_validate(raw).to_projections()
            elif kind == "channel":
                witness = QuantumChannelPayload.model_validate(raw).to_channel()
            elif kind == "gram":
                witness = GramPayload.model_validate(raw).to_gram()
            elif kind == "theta":
                from theta import ThetaWitnessPayload

                witness = ThetaWitnessPayload.model_validate(raw).to_witness()
        return cls(
            parameter=payload["parameter"],
            direction=payload["direction"],
            value=int(payload["value"]),
            witness_kind=kind,
            witness=witness,
            seed=payload.get("seed"),
            verified=bool(payload.get("verified", False)),
            notes=list(payload.get("notes", [])),
        )


@dataclass(frozen=True, eq=False)
class GramBlockMatrix:
    """Hermitian PSD matrix partitioned into blocks of the given sizes"""

    data: np.ndarray
    block_sizes: Tuple[int, ...]

    def __post_init__(self):
        data = np.array(self.data, dtype=np.complex128)
        sizes = tuple(int(s) for s in self.block_sizes)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ShapeMismatchError(f"Gram matrix must be square, got {data.shape}")
        if any(s < 1 for s in sizes) or sum(sizes) != data.shape[0]:
            raise BlockSizeMismatchError(f"block sizes {sizes} do not partition dimension {data.shape[0]}")
        check_hermitian(data, rel=1e-10)
        report = is_psd(hermitian_part(data))
        if not report:
            raise NotPSDError(f"Gram matrix has eigenvalue {report.min_eigenvalue:.3e}")
        data = hermitian_part(data)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "block_sizes", sizes)

    @classmethod
    def uniform(cls, data: CMatrix, size: int) -> "GramBlockMatrix":
        data = as_cmatrix(data)
        if data.shape[0] % size:
            raise BlockSizeMismatchError(f"dimension {data.shape[0]} is not a multiple of block size {size}")
        return cls(data=data, block_sizes=(size,) * (data.shape[0] // size))

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def offsets(self) -> List[int]:
        return [0] + list(np.cumsum(self.block_sizes))

    def block(self, i: int, j: int) -> CMatrix:
        o = self.offsets
        return self.data[o[i]:o[i + 1], o[j]:o[j + 1]]

    def to_payload(self) -> "GramPayload":
        return GramPayload(block_sizes=list(self.block_sizes), data=MatrixPayload.from_matrix(self.data))


class GramPayload(BaseModel):
    block_sizes: List[int]
    data: MatrixPayload

    def to_gram(self) -> GramBlockMatrix:
        return GramBlockMatrix(data=self.data.to_matrix(), block_sizes=tuple(self.block_sizes))


@dataclass(frozen=True)
class NotFound:
    """Search outcome without a witness; a proof of absence only when ``exact``"""

    search: str
    budget: int
    starts: int
    best_residual: float
    exact: bool = False
    notes: Tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class RankOneWitness:
    matrix: np.ndarray
    ratio: float
    exact: bool = False


def _search_defaults(seed: Optional[int], budget: Optional[int], starts: Optional[int]) -> Tuple[int, int, int]:
    settings = get_settings()
    return (
        settings.default_seed if seed is None else seed,
        settings.search_budget if budget is None else budget,
        settings.search_starts if starts is None else starts,
    )


def psd_factor(b: CMatrix, tol: Tolerance = DEFAULT_TOL) -> CMatrix:
    """X with X*X = B, one row per retained eigenvalue"""
    eigenvalues, vectors = scipy.linalg.eigh(hermitian_part(as_cmatrix(b)))
    top = eigenvalues[-1] if eigenvalues.size else 0.0
    if top <= 0.0:
        return np.zeros((0, b.shape[0]), dtype=np.complex128)
    keep = eigenvalues > tol.rank_rel * top
    return (np.sqrt(eigenvalues[keep])[:, None] * dagger(vectors[:, keep]))[::-1]


# ---------------------------------------------------------------------------
# alpha: independent sets
# ---------------------------------------------------------------------------


def _left_quadratic(forms: np.ndarray, v: np.ndarray) -> np.ndarray:
    """sum_c (F_c v)(F_c v)*"""
    fv = np.einsum("cij,j->ci", forms, v)
    return fv.T @ fv.conj()


def _right_quadratic(forms: np.ndarray, u: np.ndarray) -> np.ndarray:
    """sum_c (F_c* u)(F_c* u)*"""
    fu = np.einsum("cji,j->ci", forms.conj(), u)
    return fu.T @ fu.conj()


def _min_eigvec(q: np.ndarray) -> Tuple[float, np.ndarray]:
    values, vectors = scipy.linalg.eigh(hermitian_part(q), subset_by_index=[0, 0])
    return float(values[0]), vectors[:, 0]


def independence_residuals(system: OperatorSystem, x: VectorTuple) -> np.ndarray:
    """||P_S(x_p x_q*)|| for all ordered pairs, unit-normalized vectors"""
    v = x.normalized()
    m = x.n
    coords = np.einsum("bij,pi,qj->pqb", system.basis.conj(), v, v.conj())
    res = np.linalg.norm(coords, axis=2)
    res[np.arange(m), np.arange(m)] = 0.0
    return res


def verify_independent_set(system: OperatorSystem, x: VectorTuple) -> bool:
    """True iff x_p x_q* lies in the orthocomplement of S for all p != q"""
    if x.k != system.n:
        raise AmbientMismatchError(f"vectors live in C^{x.k}, system in M_{system.n}")
    if x.n == 1:
        return True
    return bool(np.max(independence_residuals(system, x)) < MEMBERSHIP_TOL)


def alpha_certificate(system: OperatorSystem, x: VectorTuple, seed: Optional[int] = None) -> ParamCertificate:
    ok = verify_independent_set(system, x)
    if not ok:
        logger.warning(f"vector tuple of size {x.n} is not S-independent")
    return ParamCertificate(
        parameter="alpha", direction="lower", value=x.n, witness_kind="vectors",
        witness=x, seed=seed, verified=ok,
    )


def alpha_search(
    system: OperatorSystem,
    target_m: int,
    seed: Optional[int] = None,
    budget: Optional[int] = None,
    starts: Optional[int] = None,
) -> Union[ParamCertificate, NotFound]:
    """Search for an S-independent tuple of ``target_m`` unit vectors.

    Block-coordinate descent on sum_{p != q} ||P_S(x_p x_q*)||^2: each x_p is
    replaced by the smallest eigenvector of its quadratic form with the other
    vectors held fixed. Starts run in seed order; the first success wins.
    """
    seed, budget, starts = _search_defaults(seed, budget, starts)
    n, forms = system.n, system.basis
    if target_m <= 1:
        return alpha_certificate(system, VectorTuple(vectors=np.eye(n)[:1]), seed)
    best = math.inf
    for start in range(starts):
        rng = np.random.default_rng(seed + start)
        x = random_complex(rng, target_m, n)
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        objective = math.inf
        for _ in range(budget):
            objective = 0.0
            for p in range(target_m):
                q_form = np.zeros((n, n), dtype=np.complex128)
                for q in range(target_m):
                    if q != p:
                        q_form += _left_quadratic(forms, x[q]) + _right_quadratic(forms, x[q])
                value, x[p] = _min_eigvec(q_form)
                objective = max(objective, value)
            if objective < SEARCH_OBJECTIVE_TARGET:
                break
        candidate = VectorTuple(vectors=x)
        if verify_independent_set(system, candidate):
            logger.info(f"alpha search found an independent set of size {target_m} (seed {seed + start})")
            return alpha_certificate(system, candidate, seed + start)
        best = min(best, float(np.max(independence_residuals(system, candidate))))
    logger.info(f"alpha search for size {target_m} exhausted {starts} starts x {budget} iterations")
    return NotFound(search="alpha", budget=budget, starts=starts, best_residual=best)


def standard_basis_alpha(system: OperatorSystem) -> ParamCertificate:
    """Largest S-independent set of standard basis vectors, found exactly"""
    g = standard_basis_graph(system)
    chosen = maximum_independent_set(g)
    x = VectorTuple(vectors=np.eye(system.n)[chosen])
    return alpha_certificate(system, x)


def standard_basis_graph(system: OperatorSystem) -> Graph:
    """i ~ j unless both E_ij and E_ji are orthogonal to S"""
    n = system.n
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            eij = np.zeros((n, n), dtype=np.complex128)
            eij[i, j] = 1.0
            if np.linalg.norm(system.space.project(eij)) > MEMBERSHIP_TOL or np.linalg.norm(
                system.space.project(eij.T)
            ) > MEMBERSHIP_TOL:
                edges.append((i, j))
    return Graph.from_edges(n, edges)


def graph_of_system(system: OperatorSystem, tol: Tolerance = DEFAULT_TOL) -> Optional[Graph]:
    """G with S = S_G when S is spanned by matrix units, else None"""
    g = standard_basis_graph(system)
    return g if equals(system, graph_system(g), tol) else None


# ---------------------------------------------------------------------------
# Rank-one matrices in a subspace
# ---------------------------------------------------------------------------


def _rank_one_exact_2x2(space: MatrixSubspace) -> Union[RankOneWitness, NotFound]:
    def ratio(m: CMatrix) -> float:
        s = scipy.linalg.svdvals(m)
        return float(s[1] / s[0]) if s[0] > 0 else 1.0

    if space.dim == 0:
        return NotFound(search="rank-one", budget=0, starts=0, best_residual=math.inf, exact=True,
                        notes=("subspace is zero",))
    b1 = space.basis[0]
    a = complex(np.linalg.det(b1))
    if space.dim == 1:
        if abs(a) <= 1e-14:
            return RankOneWitness(matrix=b1, ratio=ratio(b1), exact=True)
        return NotFound(search="rank-one", budget=0, starts=0, best_residual=abs(a), exact=True,
                        notes=("det(c B1) = c^2 det(B1) vanishes only at c = 0",))
    b2 = space.basis[1]
    c = complex(np.linalg.det(b2))
    b = complex(np.linalg.det(b1 + b2)) - a - c
    # det(t B1 + B2) = a t^2 + b t + c always has a root over C
    if abs(a) <= 1e-14:
        m = b1
    else:
        roots = np.roots([a, b, c])
        t = roots[np.argmin(np.abs(roots))]
        m = t * b1 + b2
    m = m / np.linalg.norm(m)
    return RankOneWitness(matrix=m, ratio=ratio(m), exact=True)


def rank_one_in_subspace(
    space: MatrixSubspace,
    seed: Optional[int] = None,
    budget: Optional[int] = None,
    starts: Optional[int] = None,
) -> Union[RankOneWitness, NotFound]:
    """Find a rank-one matrix u v* in ``space``.

    For 2x2 ambients and dimension <= 2 the determinant equation is solved
    exactly, so NotFound is a certificate there. Otherwise u and v are updated
    alternately as smallest eigenvectors of ||P_{space-perp}(u v*)||^2.
    """
    if not space.is_square:
        raise ShapeMismatchError(f"rank_one_in_subspace needs a square ambient, got {space.rows}x{space.cols}")
    if space.rows == 2 and space.dim <= 2:
        return _rank_one_exact_2x2(space)
    if space.dim == 0:
        return NotFound(search="rank-one", budget=0, starts=0, best_residual=math.inf, exact=True)
    seed, budget, starts = _search_defaults(seed, budget, starts)
    n = space.rows
    forms = perp(space).basis
    if forms.shape[0] == 0:
        return RankOneWitness(matrix=np.outer(np.eye(n)[0], np.eye(n)[0]).astype(np.complex128), ratio=0.0)
    best = math.inf
    for start in range(starts):
        rng = np.random.default_rng(seed + start)
        u = random_complex(rng, n)
        v = random_complex(rng, n)
        v /= np.linalg.norm(v)
        for _ in range(budget):
            _, u = _min_eigvec(_left_quadratic(forms, v))
            value, v = _min_eigvec(_right_quadratic(forms, u))
            if value < SEARCH_OBJECTIVE_TARGET:
                break
        m = space.project(np.outer(u, v.conj()))
        norm = np.linalg.norm(m)
        if norm > 0:
            s = scipy.linalg.svdvals(m / norm)
            r = float(s[1] / s[0])
            if r < RANK_ONE_RATIO:
                logger.info(f"rank-one matrix found in subspace of dimension {space.dim} (seed {seed + start})")
                return RankOneWitness(matrix=m / norm, ratio=r)
            best = min(best, r)
    return NotFound(search="rank-one", budget=budget, starts=starts, best_residual=best)


def rank_one_alpha_pair(witness: RankOneWitness) -> VectorTuple:
    """Singular vector pair (u, v) of a rank-one M = s u v*"""
    u, _, vh = scipy.linalg.svd(witness.matrix)
    return VectorTuple(vectors=np.stack([u[:, 0], vh[0].conj()]))


# ---------------------------------------------------------------------------
# beta / gamma / inter: channel and Gram certificates
# ---------------------------------------------------------------------------


def _require_input(system: OperatorSystem, channel: QuantumChannel) -> None:
    if channel.n != system.n:
        raise AmbientMismatchError(f"channel input is C^{channel.n}, system lives in M_{system.n}")


def verify_gamma_certificate(
    system: OperatorSystem, channel: QuantumChannel, tol: Tolerance = DEFAULT_TOL
) -> ParamCertificate:
    """gamma(S) <= k when the confusability system of the channel equals S"""
    _require_input(system, channel)
    s_phi = confusability_system(channel, tol)
    ok = equals(s_phi, system, tol)
    notes = [] if ok else [
        f"system mismatch: dim S_Phi = {s_phi.dim}, dim S = {system.dim}, "
        f"largest principal angle {angle_between(s_phi, system):.3e}"
    ]
    if not ok:
        logger.warning(f"gamma certificate rejected: {notes[0]}")
    return ParamCertificate(
        parameter="gamma", direction="upper", value=channel.k, witness_kind="channel",
        witness=channel, verified=ok, notes=notes,
    )


def verify_beta_certificate(
    system: OperatorSystem, channel: QuantumChannel, tol: Tolerance = DEFAULT_TOL
) -> ParamCertificate:
    """beta(S) <= k when the confusability system of the channel lies inside S"""
    _require_input(system, channel)
    s_phi = confusability_system(channel, tol)
    ok = contains(system, s_phi, tol)
    notes = []
    if not ok:
        worst = max(system.space.residual(b) for b in s_phi.basis)
        notes.append(f"system mismatch: S_Phi leaves S with residual {worst:.3e}")
        logger.warning(f"beta certificate rejected: {notes[0]}")
    return ParamCertificate(
        parameter="beta", direction="upper", value=channel.k, witness_kind="channel",
        witness=channel, verified=ok, notes=notes,
    )


def verify_noncancelling(channel: QuantumChannel) -> bool:
    """True iff every Kraus operator is (entrywise non-negative) x (invertible diagonal).

    Decided column by column: the non-zero entries of a column must share one phase.
    """
    for a in channel.kraus:
        scale = float(np.max(np.abs(a))) if a.size else 0.0
        for col in a.T:
            nz = col[np.abs(col) > 1e-12 * max(scale, 1.0)]
            if nz.size <= 1:
                continue
            ref = nz[0] / abs(nz[0])
            angles = np.abs(np.angle(nz / np.abs(nz) / ref))
            if np.max(angles) > NONCANCELLING_ANGLE:
                return False
    return True


def inter_certificate(system: OperatorSystem, channel: QuantumChannel, tol: Tolerance = DEFAULT_TOL) -> ParamCertificate:
    """Upper bound on the intersection number of S from a non-cancelling gamma witness"""
    gamma = verify_gamma_certificate(system, channel, tol)
    noncancelling = verify_noncancelling(channel)
    notes = list(gamma.notes)
    if not noncancelling:
        notes.append("channel is not non-cancelling")
    return ParamCertificate(
        parameter="inter", direction="upper", value=channel.k, witness_kind="channel",
        witness=channel, verified=gamma.verified and noncancelling, notes=notes,
    )


def verify_eta_certificate(
    system: OperatorSystem,
    gram: GramBlockMatrix,
    mode: Literal["beta", "gamma"] = "gamma",
    tol: Tolerance = DEFAULT_TOL,
) -> ParamCertificate:
    """Bound from a PSD block matrix B = [B_ij] with blocks in S and sum_i B_ii = I.

    The value is rank B. The factor X of B = X*X, sliced into blocks, is the
    equivalent Kraus family; its channel certificate is checked as well.
    """
    n = system.n
    if any(s != n for s in gram.block_sizes):
        raise BlockSizeMismatchError(f"blocks must all be {n}x{n}, got sizes {gram.block_sizes}")
    notes: List[str] = []
    diag_sum = sum(gram.block(i, i) for i in range(gram.n_blocks))
    trace_defect = float(np.max(np.abs(diag_sum - np.eye(n))))
    ok = trace_defect < MEMBERSHIP_TOL
    if not ok:
        notes.append(f"diagonal blocks sum to I with defect {trace_defect:.3e}")

    blocks = [gram.block(i, j) for i in range(gram.n_blocks) for j in range(gram.n_blocks)]
    if mode == "beta":
        worst = max(system.space.residual(b) for b in blocks)
        inside = worst < MEMBERSHIP_TOL * max(1.0, float(np.linalg.norm(gram.data, 2)))
        if not inside:
            notes.append(f"a block leaves S with residual {worst:.3e}")
        ok = ok and inside
    else:
        from opsys import make_operator_system

        spanned = make_operator_system(blocks, n=n, tol=tol)
        same = equals(spanned, system, tol)
        if not same:
            notes.append(f"block span has dimension {spanned.dim}, S has dimension {system.dim}")
        ok = ok and same

    value = numerical_rank(gram.data, tol)
    if ok:
        factor = psd_factor(gram.data, tol)
        channel = kraus_from_factor(factor, n)
        verify = verify_beta_certificate if mode == "beta" else verify_gamma_certificate
        cross = verify(system, channel, tol)
        if not cross.verified or cross.value != value:
            notes.append("factored Kraus family failed the channel cross-check")
            ok = False
    if not ok:
        logger.warning(f"Gram certificate ({mode}) rejected: {'; '.join(notes)}")
    return ParamCertificate(
        parameter=mode, direction="upper", value=value, witness_kind="gram",
        witness=gram, verified=ok, notes=notes,
    )


def gram_of_channel(channel: QuantumChannel) -> GramBlockMatrix:
    """B = [A_i* A_j], the block Gram matrix of a Kraus family"""
    x = np.concatenate(list(channel.kraus), axis=1)
    return GramBlockMatrix.uniform(dagger(x) @ x, channel.n)


def two_dim_tensor_gram() -> GramBlockMatrix:
    """W*W for W = [V1 V2 V3 V4]/2 in M_{8,16}, a rank-8 Gram certificate for S_2 (x) S_2"""
    e = np.eye(8, dtype=np.complex128)
    columns = [(0, 1, 2, 3), (1, 4, 3, 5), (2, 3, 6, 7), (5, 6, 4, 0)]
    w = 0.5 * np.concatenate([e[:, list(c)] for c in columns], axis=1)
    return GramBlockMatrix.uniform(dagger(w) @ w, 4)


def _kraus_objective(a: np.ndarray, forms: np.ndarray) -> Tuple[float, np.ndarray]:
    """f = sum_{i,j,c} |<A_i* A_j, C_c>|^2 and df/d conj(A)"""
    g = np.einsum("ipk,jpl,ckl->ijc", a.conj(), a, forms.conj())
    value = float(np.sum(np.abs(g) ** 2))
    grad = np.einsum("ijc,jpl,ckl->ipk", g.conj(), a, forms.conj())
    grad += np.einsum("jic,jpl,clk->ipk", g, a, forms)
    return value, grad


def gamma_search(
    system: OperatorSystem,
    k: int,
    seed: Optional[int] = None,
    budget: Optional[int] = None,
    starts: Optional[int] = None,
    mode: Literal["beta", "gamma"] = "gamma",
    tol: Tolerance = DEFAULT_TOL,
) -> Union[ParamCertificate, NotFound]:
    """Search for a channel into M_k with S_Phi = S (gamma) or S_Phi inside S (beta).

    Riemannian descent on the Stiefel manifold of stacked Kraus families
    V = [A_1; ...; A_m] with V*V = I, minimizing the component of every
    A_i* A_j orthogonal to S. Polar retraction, Armijo backtracking.
    """
    seed, budget, starts = _search_defaults(seed, budget, starts)
    n = system.n
    m = max(min(n * k, get_settings().max_search_kraus), -(-n // k))
    forms = system.perp.basis
    verify = verify_gamma_certificate if mode == "gamma" else verify_beta_certificate
    if forms.shape[0] == 0:
        channel = trace_channel(n) if k == 1 else random_channel(np.random.default_rng(seed), n, k, m)
        cert = verify(system, channel, tol)
        cert.seed = seed
        return cert if cert.verified else NotFound(search=f"{mode}-channel", budget=0, starts=1, best_residual=0.0)

    best = math.inf
    for start in range(starts):
        rng = np.random.default_rng(seed + start)
        v = random_isometry(rng, m * k, n)
        step = 1.0
        value, grad = _kraus_objective(v.reshape(m, k, n), forms)
        for _ in range(budget):
            if value < SEARCH_OBJECTIVE_TARGET:
                break
            egrad = 2.0 * grad.reshape(m * k, n)
            rgrad = egrad - v @ hermitian_part(dagger(v) @ egrad)
            slope = float(np.real(np.vdot(rgrad, rgrad)))
            if slope < 1e-30:
                break
            while True:
                u, _, wh = scipy.linalg.svd(v - step * rgrad, full_matrices=False)
                trial = u @ wh
                trial_value, trial_grad = _kraus_objective(trial.reshape(m, k, n), forms)
                if trial_value <= value - 1e-4 * step * slope or step < 1e-12:
                    break
                step *= 0.5
            v, value, grad = trial, trial_value, trial_grad
            step *= 2.0
        best = min(best, value)
        if value < 1e-16:
            cert = verify(system, QuantumChannel(kraus=v.reshape(m, k, n)), tol)
            if cert.verified:
                cert.seed = seed + start
                logger.info(f"{mode} search found a channel into M_{k} (seed {seed + start})")
                return cert
    logger.info(f"{mode} search into M_{k} exhausted {starts} starts, best residual {best:.3e}")
    return NotFound(search=f"{mode}-channel", budget=budget, starts=starts, best_residual=best)


def chromatic_beta_certificate(g: Graph, tol: Tolerance = DEFAULT_TOL) -> ParamCertificate:
    """beta(S_G) <= chi(G^c) via the Delta_x channel of a complement coloring"""
    x = complement_coloring_vectors(g)
    return verify_beta_certificate(graph_system(g), delta_channel(x), tol)


def classical_inter_certificate(g: Graph, tol: Tolerance = DEFAULT_TOL) -> ParamCertificate:
    """inter(S_G) <= inter(G) via the canonical channel of an intersection witness"""
    witness = intersection_number(g)
    channel = from_classical(channel_from_sets(witness.family, outputs=witness.size))
    return inter_certificate(graph_system(g), channel, tol)


# ---------------------------------------------------------------------------
# Gram matrices of projection tuples: F_t^+(G) and H_t^+(G)
# ---------------------------------------------------------------------------


def _block_pattern_violation(gram: GramBlockMatrix, g: Graph, tol: Tolerance) -> Optional[str]:
    scale = float(np.linalg.norm(gram.data, 2))
    for i in range(g.n):
        for j in range(i + 1, g.n):
            nonzero = float(np.linalg.norm(gram.block(i, j))) > tol.block_zero_rel * scale
            if nonzero != g.adjacent(i, j):
                return f"block ({i}, {j}) is {'non-zero' if nonzero else 'zero'} but the graph says otherwise"
    return None


def check_f_membership(gram: GramBlockMatrix, g: Graph, tol: Tolerance = DEFAULT_TOL) -> None:
    """Raise NotInFError unless B is PSD with G's block pattern and rank B_ii = t_i"""
    if gram.n_blocks != g.n:
        raise NotInFError("block count", f"{gram.n_blocks} blocks for {g.n} vertices")
    violation = _block_pattern_violation(gram, g, tol)
    if violation:
        raise NotInFError("zero pattern", violation)
    for i, t in enumerate(gram.block_sizes):
        r = numerical_rank(gram.block(i, i), tol)
        if r != t:
            raise NotInFError("diagonal rank", f"block {i} has rank {r}, expected {t}")


def check_h_membership(gram: GramBlockMatrix, g: Graph, tol: Tolerance = DEFAULT_TOL) -> None:
    if gram.n_blocks != g.n:
        raise NotInHError(f"{gram.n_blocks} blocks for {g.n} vertices")
    for i, t in enumerate(gram.block_sizes):
        defect = float(np.max(np.abs(gram.block(i, i) - np.eye(t))))
        if defect > MEMBERSHIP_TOL:
            raise NotInHError(f"diagonal block {i} deviates from the identity by {defect:.3e}")
    violation = _block_pattern_violation(gram, g, tol)
    if violation:
        raise NotInHError(violation)


def _block_columns(x: CMatrix, sizes: Sequence[int]) -> List[CMatrix]:
    offsets = [0] + list(np.cumsum(sizes))
    return [x[:, offsets[i]:offsets[i + 1]] for i in range(len(sizes))]


def gram_to_projections(gram: GramBlockMatrix, g: Graph, tol: Tolerance = DEFAULT_TOL) -> ProjectionTuple:
    """Projections onto the ranges of the column blocks X_i of B = X*X"""
    check_f_membership(gram, g, tol)
    x = psd_factor(gram.data, tol)
    ranges = [orth_columns(xi, tol) for xi in _block_columns(x, gram.block_sizes)]
    projections = ProjectionTuple.from_ranges(ranges)
    if non_orthogonality_graph_proj(projections) != g:
        raise NotInFError("projection pattern", "range projections do not reproduce the graph")
    return projections


def projections_to_gram(projections: ProjectionTuple, tol: Tolerance = DEFAULT_TOL) -> GramBlockMatrix:
    """B = X*X in H_t^+ with X_i an orthonormal basis of range(P_i)"""
    frames = [orth_columns(p, tol) for p in projections.projections]
    x = np.concatenate(frames, axis=1)
    return GramBlockMatrix(data=dagger(x) @ x, block_sizes=tuple(f.shape[1] for f in frames))


def rank_reduction_step(
    gram: GramBlockMatrix, g: Graph, index: int, tol: Tolerance = DEFAULT_TOL
) -> GramBlockMatrix:
    """Reduce block ``index`` by one column without raising the rank.

    From B = X*X in H_t^+(G): Y drops the first column x of block ``index``, Z
    repeats x in the remaining columns of that block, and W = Y + eps Z gives
    W*W in F_s^+(G) for small eps, starting at a / (4b).
    """
    check_h_membership(gram, g, tol)
    sizes = list(gram.block_sizes)
    if sizes[index] < 2:
        raise BlockTooSmallError(f"block {index} has size {sizes[index]}; reduction needs at least 2")
    x = psd_factor(gram.data, tol)
    start = gram.offsets[index]
    deleted = x[:, start]
    y = np.delete(x, start, axis=1)
    z = np.zeros_like(y)
    width = sizes[index] - 1
    z[:, start:start + width] = deleted[:, None]

    xy = np.abs(dagger(x) @ y[:, start:start + width])
    xz = np.abs(dagger(x) @ z[:, start:start + width])
    cutoff = tol.block_zero_rel * max(1.0, float(np.max(np.abs(gram.data))))
    nonzero = xy[xy > cutoff]
    b = float(np.max(xz)) if xz.size else 0.0
    if nonzero.size == 0 or b <= cutoff:
        raise DegenerateABoundsError("X*Y_i or X*Z_i vanishes; the epsilon interval is undefined")
    a = float(np.min(nonzero))

    reduced_sizes = tuple(sizes[:index] + [width] + sizes[index + 1:])
    eps = a / (4.0 * b)
    for _ in range(EPSILON_HALVINGS):
        w = y + eps * z
        candidate = GramBlockMatrix(data=dagger(w) @ w, block_sizes=reduced_sizes)
        try:
            check_f_membership(candidate, g, tol)
        except NotInFError as e:
            logger.debug(f"eps = {eps:.3e} rejected: {e}")
            eps *= 0.5
            continue
        logger.debug(f"block {index} reduced to size {width} with eps = {eps:.3e}")
        return candidate
    raise NotInFError("epsilon schedule", f"no eps in {EPSILON_HALVINGS} halvings kept the pattern")


def reduce_to_unit_ranks(gram: GramBlockMatrix, g: Graph, tol: Tolerance = DEFAULT_TOL) -> GramBlockMatrix:
    """Apply rank reduction steps until every block has size one"""
    current = gram
    while True:
        check_f_membership(current, g, tol)
        current = projections_to_gram(gram_to_projections(current, g, tol), tol)
        wide = [i for i, t in enumerate(current.block_sizes) if t >= 2]
        if not wide:
            return current
        current = rank_reduction_step(current, g, wide[0], tol)


def _greedy_frames(
    g: Graph, k: int, ranks: Sequence[int], rng: np.random.Generator, order: Sequence[int]
) -> Optional[List[CMatrix]]:
    """Random orthonormal frames X_i in C^k with X_i orthogonal to all placed non-neighbors"""
    frames: List[Optional[CMatrix]] = [None] * g.n
    for i in order:
        blockers = [frames[j] for j in range(g.n) if j != i and not g.adjacent(i, j) and frames[j] is not None]
        if blockers:
            taken = np.concatenate(blockers, axis=1)
            free = scipy.linalg.null_space(dagger(taken))
        else:
            free = np.eye(k, dtype=np.complex128)
        if free.shape[1] < ranks[i]:
            return None
        mix = random_isometry(rng, free.shape[1], ranks[i])
        frames[i] = free @ mix
    return frames  # type: ignore[return-value]


def _coordinate_frames(
    g: Graph, frames: List[CMatrix], ranks: Sequence[int], rng: np.random.Generator, budget: int
) -> List[CMatrix]:
    """Refine frames: X_i spans the smallest eigenvectors of sum over non-neighbors X_j X_j*"""
    k = frames[0].shape[0]
    for _ in range(budget):
        worst = 0.0
        for i in range(g.n):
            blockers = np.zeros((k, k), dtype=np.complex128)
            friends = np.zeros((k, k), dtype=np.complex128)
            for j in range(g.n):
                if j == i:
                    continue
                target = friends if g.adjacent(i, j) else blockers
                target += frames[j] @ dagger(frames[j])
            values, vectors = scipy.linalg.eigh(hermitian_part(blockers))
            t = ranks[i]
            null = vectors[:, values < 1e-12 * max(1.0, values[-1])]
            if null.shape[1] > t:
                h = hermitian_part(dagger(null) @ friends @ null)
                noise = random_complex(rng, null.shape[1], null.shape[1])
                _, inner = scipy.linalg.eigh(h + 1e-3 * hermitian_part(noise))
                frames[i] = null @ inner[:, -t:]
            else:
                frames[i] = vectors[:, :t]
                worst = max(worst, float(np.sum(values[:t])))
        if worst < SEARCH_OBJECTIVE_TARGET:
            break
    return frames


def qinter_search(
    g: Graph,
    k: int,
    ranks: Optional[Sequence[int]] = None,
    seed: Optional[int] = None,
    budget: Optional[int] = None,
    starts: Optional[int] = None,
    tol: Tolerance = DEFAULT_TOL,
) -> Union[ParamCertificate, NotFound]:
    """Search for projections P in M_k of ranks t whose non-orthogonality graph is G"""
    seed, budget, starts = _search_defaults(seed, budget, starts)
    t = [1] * g.n if ranks is None else list(ranks)
    if len(t) != g.n or any(r < 1 for r in t):
        raise VertexCountMismatchError(f"rank vector {t} does not fit a graph on {g.n} vertices")
    if any(r > k for r in t):
        return NotFound(search="qinter", budget=0, starts=0, best_residual=math.inf, exact=True,
                        notes=("a rank exceeds the ambient dimension",))
    comp = complement(g)
    base_order = sorted(range(g.n), key=lambda v: (comp.degree(v), v))
    for start in range(starts):
        rng = np.random.default_rng(seed + start)
        order = base_order if start == 0 else list(rng.permutation(g.n))
        frames = _greedy_frames(g, k, t, rng, order)
        if frames is None:
            frames = [random_isometry(rng, k, r) for r in t]
            frames = _coordinate_frames(g, frames, t, rng, budget)
        try:
            projections = ProjectionTuple.from_ranges(frames)
            if non_orthogonality_graph_proj(projections) != g:
                continue
            gram = projections_to_gram(projections, tol)
            gram_to_projections(gram, g, tol)
        except (NotInFError, ValueError) as e:
            logger.debug(f"qinter start {start} rejected: {e}")
            continue
        logger.info(f"projections in M_{k} realizing the graph found (seed {seed + start})")
        return ParamCertificate(
            parameter="qinter", direction="upper", value=k, witness_kind="projections",
            witness=projections, seed=seed + start, verified=True,
        )
    return NotFound(search="qinter", budget=budget, starts=starts, best_residual=math.inf)


def vector_representation(
    g: Graph, k: int, seed: Optional[int] = None, budget: Optional[int] = None, starts: Optional[int] = None
) -> Optional[VectorTuple]:
    """Unit vectors x in C^k with G(x) = G, from a rank-one qinter search"""
    result = qinter_search(g, k, seed=seed, budget=budget, starts=starts)
    if isinstance(result, NotFound):
        return None
    projections = result.witness.projections
    vectors = []
    for p in projections:
        values, vecs = scipy.linalg.eigh(hermitian_part(p))
        vectors.append(vecs[:, -1])
    x = VectorTuple(vectors=np.stack(vectors))
    return x if non_orthogonality_graph(x) == g else None


def random_h_instance(
    g: Graph, ranks: Sequence[int], rng: np.random.Generator, extra: int = 0
) -> GramBlockMatrix:
    """Random element of H_t^+(G).

    Starts from a vector representation in C^n and widens block i by t_i - 1
    random unit columns orthogonal to its own block and every non-neighbor's.
    """
    n = g.n
    widen = sum(r - 1 for r in ranks)
    k = n + widen + extra
    base = _greedy_frames(g, n, [1] * n, rng, sorted(range(n), key=lambda v: v))
    if base is None:
        raise AssertionError("a graph on n vertices always has a vector representation in C^n")
    frames = [np.vstack([f, np.zeros((k - n, 1), dtype=np.complex128)]) for f in base]
    for i in range(n):
        for _ in range(ranks[i] - 1):
            taken = np.concatenate(
                [frames[i]] + [frames[j] for j in range(n) if j != i and not g.adjacent(i, j)], axis=1
            )
            free = scipy.linalg.null_space(dagger(taken))
            column = free @ random_isometry(rng, free.shape[1], 1)
            frames[i] = np.concatenate([frames[i], column], axis=1)
    mixer = random_isometry(rng, k, k)
    x = mixer @ np.concatenate(frames, axis=1)
    return GramBlockMatrix(data=dagger(x) @ x, block_sizes=tuple(ranks))


# ---------------------------------------------------------------------------
# Exact dimension-two refutation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DimensionTwoReport:
    feasible: bool
    reason: str
    vectors: Optional[VectorTuple] = field(default=None, compare=False)


def refute_dimension_two(g: Graph) -> DimensionTwoReport:
    """Decide exactly whether unit vectors in C^2 realize G as a non-orthogonality graph.

    In C^2, x orthogonal to y fixes y up to scale, so lines propagate along the
    complement graph: one line per side of each bipartite component, distinct
    components on generic lines. Any odd cycle or forced orthogonality on an
    edge of G refutes dimension two.
    """
    comp = complement(g)
    side = [-1] * g.n
    component = [-1] * g.n
    count = 0
    for root in range(g.n):
        if side[root] >= 0:
            continue
        side[root], component[root] = 0, count
        stack = [root]
        while stack:
            v = stack.pop()
            for u in range(g.n):
                if not comp.adjacent(v, u):
                    continue
                if side[u] < 0:
                    side[u], component[u] = 1 - side[v], count
                    stack.append(u)
                elif side[u] == side[v]:
                    return DimensionTwoReport(
                        feasible=False,
                        reason=f"odd cycle through vertices {v} and {u} in the complement forces a line orthogonal to itself",
                    )
        count += 1
    vectors = np.zeros((g.n, 2), dtype=np.complex128)
    for v in range(g.n):
        c = component[v] + 1.0
        vectors[v] = (1.0, c) if side[v] == 0 else (-c, 1.0)
    x = VectorTuple(vectors=vectors)
    realized = non_orthogonality_graph(x)
    if realized != g:
        missing = sorted(g.edges - realized.edges)
        return DimensionTwoReport(
            feasible=False,
            reason=f"edges {missing} are forced orthogonal by propagation",
        )
    return DimensionTwoReport(feasible=True, reason="propagation is consistent", vectors=x)


# ---------------------------------------------------------------------------
# Certificate transforms
# ---------------------------------------------------------------------------


def transform_conjugate(
    cert: ParamCertificate, system: OperatorSystem, u: CMatrix, tol: Tolerance = DEFAULT_TOL
) -> Tuple[OperatorSystem, ParamCertificate]:
    """Carry a gamma channel certificate for S to U* S U"""
    moved = conjugate(system, u)
    return moved, verify_gamma_certificate(moved, conjugate_channel(cert.witness, u), tol)


def transform_direct_sum(
    cert1: ParamCertificate, s1: OperatorSystem, cert2: ParamCertificate, s2: OperatorSystem,
    tol: Tolerance = DEFAULT_TOL,
) -> Tuple[OperatorSystem, ParamCertificate]:
    """Block-stack two gamma channel certificates: value k1 + k2 for the block sum"""
    summed = block_sum(s1, s2)
    return summed, verify_gamma_certificate(summed, direct_sum_channel(cert1.witness, cert2.witness), tol)


def transform_tensor(
    cert1: ParamCertificate, s1: OperatorSystem, cert2: ParamCertificate, s2: OperatorSystem,
    tol: Tolerance = DEFAULT_TOL,
) -> Tuple[OperatorSystem, ParamCertificate]:
    """Kronecker-combine two gamma channel certificates: value k1 k2"""
    product = tensor_system(s1, s2)
    return product, verify_gamma_certificate(product, tensor_channel(cert1.witness, cert2.witness), tol)


# ---------------------------------------------------------------------------
# Bounds report
# ---------------------------------------------------------------------------


class Bound(BaseModel):
    value: Optional[int] = None
    witness_ref: Optional[str] = None


class ParameterInterval(BaseModel):
    parameter: str
    lower: Bound
    upper: Bound
    exact: bool = False
    notes: List[str] = Field(default_factory=list)


class BoundsReport(BaseModel):
    n: int
    dim: int
    intervals: List[ParameterInterval]
    certificates: List[Dict[str, Any]] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    def interval(self, parameter: str) -> ParameterInterval:
        for item in self.intervals:
            if item.parameter == parameter:
                return item
        raise KeyError(parameter)


class _Ledger:
    """Collects verified certificates and tracks the best bound per parameter"""

    def __init__(self):
        self.certificates: List[ParamCertificate] = []
        self.lower: Dict[str, Bound] = {}
        self.upper: Dict[str, Bound] = {}
        self.notes: Dict[str, List[str]] = {p: [] for p in ("alpha", "beta", "gamma", "inter")}

    def add(self, cert: ParamCertificate) -> None:
        if not cert.verified:
            return
        ref = f"#{len(self.certificates)}:{cert.parameter}/{cert.direction}/{cert.witness_kind}"
        self.certificates.append(cert)
        if cert.direction == "lower":
            self.raise_lower(cert.parameter, cert.value, ref)
        else:
            current = self.upper.get(cert.parameter)
            if current is None or cert.value < current.value:
                self.upper[cert.parameter] = Bound(value=cert.value, witness_ref=ref)

    def raise_lower(self, parameter: str, value: int, ref: Optional[str]) -> None:
        current = self.lower.get(parameter)
        if current is None or value > current.value:
            self.lower[parameter] = Bound(value=value, witness_ref=ref)

    def lower_value(self, parameter: str, default: int = 1) -> int:
        bound = self.lower.get(parameter)
        return default if bound is None else bound.value

    def upper_value(self, parameter: str) -> Optional[int]:
        bound = self.upper.get(parameter)
        return None if bound is None else bound.value


def _clip_chain(ledger: _Ledger, n: int) -> None:
    """Propagate alpha <= beta <= gamma <= inter through the recorded bounds"""
    chain = ["alpha", "beta", "gamma", "inter"]
    for lo, hi in zip(chain, chain[1:]):
        bound = ledger.lower.get(lo)
        if bound is not None:
            ledger.raise_lower(hi, bound.value, bound.witness_ref)
    for hi, lo in zip(reversed(chain), list(reversed(chain))[1:]):
        bound = ledger.upper.get(hi)
        current = ledger.upper.get(lo)
        if bound is not None and (current is None or bound.value < current.value):
            ledger.upper[lo] = Bound(value=bound.value, witness_ref=bound.witness_ref)
    current = ledger.upper.get("alpha")
    if current is None or n < current.value:
        ledger.upper["alpha"] = Bound(value=n, witness_ref="identity in S forces orthogonal vectors")


def bounds_report(
    system: OperatorSystem,
    effort: Literal["quick", "full"] = "quick",
    seed: Optional[int] = None,
    budget: Optional[int] = None,
    starts: Optional[int] = None,
    tol: Tolerance = DEFAULT_TOL,
) -> BoundsReport:
    """Certified intervals for alpha, beta, gamma and inter of S"""
    seed, budget, starts = _search_defaults(seed, budget, starts)
    if effort == "quick":
        budget, starts = min(budget, 200), min(starts, 3)
    n = system.n
    ledger = _Ledger()
    report_notes: List[str] = []

    # lower bounds
    ledger.add(standard_basis_alpha(system))
    target = ledger.lower_value("alpha") + 1
    while target <= n:
        result = alpha_search(system, target, seed, budget, starts)
        if isinstance(result, NotFound):
            break
        ledger.add(result)
        target += 1
    if n == 2 and system.perp.dim <= 2:
        exact = rank_one_in_subspace(system.perp)
        if isinstance(exact, NotFound) and exact.exact:
            ledger.upper["alpha"] = Bound(value=1, witness_ref="perp contains no rank-one matrix (exact)")
        elif isinstance(exact, RankOneWitness):
            ledger.add(alpha_certificate(system, rank_one_alpha_pair(exact)))
    if system.is_full:
        ledger.notes["beta"].append("beta = 1 exactly when S = M_n")
    else:
        ledger.raise_lower("beta", 2, "beta = 1 only for S = M_n")

    # upper bounds from known channels
    candidates = [identity_channel(n), trace_channel(n)]
    if n == 2:
        candidates.append(two_dim_channel())
    candidates.append(realize(system, tol))
    for channel in candidates:
        ledger.add(verify_beta_certificate(system, channel, tol))
        gamma = verify_gamma_certificate(system, channel, tol)
        ledger.add(gamma)
        if gamma.verified and verify_noncancelling(channel):
            ledger.add(inter_certificate(system, channel, tol))

    g = graph_of_system(system, tol)
    if g is not None and g.n <= 10:
        report_notes.append(f"S is the graph system of a graph with {len(g.edges)} edges")
        ledger.add(classical_inter_certificate(g, tol))
        ledger.add(chromatic_beta_certificate(g, tol))
        best = min(v for v in (ledger.upper_value("gamma"), ledger.upper_value("inter"), n) if v is not None)
        for k in range(max(ledger.lower_value("gamma", 1), ledger.lower_value("beta", 1)), best):
            x = vector_representation(g, k, seed, budget, starts)
            if x is not None and x.n <= 12:
                ledger.add(verify_gamma_certificate(system, delta_channel(x), tol))
                break
        if refute_dimension_two(g).feasible is False and len(g.edges) < g.n * (g.n - 1) // 2:
            ledger.raise_lower("gamma", 3, "dimension-two propagation is infeasible (exact)")

    # channel searches below the current upper bounds
    _clip_chain(ledger, n)
    for mode in ("beta", "gamma"):
        lo = ledger.lower_value(mode, 1)
        hi = ledger.upper_value(mode)
        if hi is None:
            continue
        search_budget = budget if effort == "full" else min(budget, 150)
        for k in range(lo, hi):
            result = gamma_search(system, k, seed, search_budget, starts, mode=mode, tol=tol)
            if not isinstance(result, NotFound):
                ledger.add(result)
                break

    _clip_chain(ledger, n)
    intervals = []
    for parameter in ("alpha", "beta", "gamma", "inter"):
        lower = ledger.lower.get(parameter, Bound(value=1, witness_ref="trivial"))
        upper = ledger.upper.get(parameter, Bound())
        notes = list(ledger.notes[parameter])
        if parameter == "inter" and upper.value is None:
            notes.append("no non-cancelling channel certificate found")
        intervals.append(ParameterInterval(
            parameter=parameter,
            lower=lower,
            upper=upper,
            exact=upper.value is not None and lower.value == upper.value,
            notes=notes,
        ))
    logger.info(
        "bounds: " + ", ".join(f"{i.parameter} in [{i.lower.value}, {i.upper.value}]" for i in intervals)
    )
    return BoundsReport(
        n=n,
        dim=system.dim,
        intervals=intervals,
        certificates=[c.to_payload() for c in ledger.certificates],
        notes=report_notes,
    )


def replay_certificate(cert: ParamCertificate, system: OperatorSystem, tol: Tolerance = DEFAULT_TOL) -> ParamCertificate:
    """Re-run the verification matching the certificate's parameter and witness"""
    kind, parameter = cert.witness_kind, cert.parameter
    if parameter == "alpha" and kind == "vectors":
        return alpha_certificate(system, cert.witness, cert.seed)
    if parameter in ("beta", "gamma") and kind == "channel":
        verify = verify_beta_certificate if parameter == "beta" else verify_gamma_certificate
        return verify(system, cert.witness, tol)
    if parameter in ("beta", "gamma") and kind == "gram":
        return verify_eta_certificate(system, cert.witness, parameter, tol)
    if parameter == "inter" and kind == "channel":
        return inter_certificate(system, cert.witness, tol)
    if parameter == "qinter" and kind == "projections":
        g = graph_of_system(system, tol)
        ok = g is not None and non_orthogonality_graph_proj(cert.witness) == g
        return ParamCertificate(
            parameter="qinter", direction="upper", value=cert.witness.k, witness_kind="projections",
            witness=cert.witness, seed=cert.seed, verified=ok,
            notes=[] if ok else ["projections do not realize the graph of S"],
        )
    raise UnsupportedCertificateError(f"no verifier for parameter {parameter!r} with witness kind {kind!r}")
