"""Lovász theta: dense SDP solver for graphs, witness lower bounds for operator systems."""

from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple, Union
import logging
import math

import numpy as np
import scipy.linalg
from pydantic import BaseModel, Field

from channels import QuantumChannel, confusability_system
from config import get_settings
from errors import (
    AmbientMismatchError,
    MaxIterationsError,
    NotInPerpError,
    NotPSDError,
    NumericalBreakdownError,
    ShapeMismatchError,
    TooLargeError,
)
from graphs import Graph, chromatic_number, complement, independence_number, shannon_capacity_lower
from numkernel import (
    DEFAULT_TOL,
    CMatrix,
    MatrixPayload,
    Tolerance,
    as_cmatrix,
    check_hermitian,
    dagger,
    hermitian_part,
    is_psd,
    kron,
    numerical_rank,
)
from opsys import OperatorSystem, graph_system, sk_system, tensor
from params import (
    BoundsReport,
    GramBlockMatrix,
    NotFound,
    ParamCertificate,
    alpha_search,
    bounds_report,
    standard_basis_alpha,
    verify_eta_certificate,
)

logger = logging.getLogger(__name__)

MAX_THETA_VERTICES = 60
PERP_MEMBERSHIP_TOL = 1e-8
STEP_FRACTION = 0.95
FEASIBILITY_TOL = 1e-8
QUICK_ALPHA_BUDGET = 60
QUICK_ALPHA_STARTS = 2


# ---------------------------------------------------------------------------
# SDP solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SdpProblem:
    """maximize <C, X> subject to <A_i, X> = b_i, X PSD"""

    objective: np.ndarray
    constraints: Tuple[Tuple[np.ndarray, float], ...]

    def __post_init__(self):
        c = as_cmatrix(self.objective)
        check_hermitian(c)
        n = c.shape[0]
        cleaned = []
        for a, b in self.constraints:
            a = as_cmatrix(a)
            if a.shape != (n, n):
                raise ShapeMismatchError(f"constraint of shape {a.shape} in a problem of size {n}")
            check_hermitian(a)
            cleaned.append((hermitian_part(a), float(b)))
        object.__setattr__(self, "objective", hermitian_part(c))
        object.__setattr__(self, "constraints", tuple(cleaned))

    @property
    def dim(self) -> int:
        return self.objective.shape[0]

    @property
    def is_real(self) -> bool:
        mats = [self.objective] + [a for a, _ in self.constraints]
        return all(not np.any(np.abs(m.imag) > 0.0) for m in mats)


@dataclass(frozen=True, eq=False)
class SdpSolution:
    x: np.ndarray
    value: float
    dual_value: float
    gap: float
    iterations: int
    y: np.ndarray


def _realify(m: CMatrix) -> np.ndarray:
    """Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix"""
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def _derealify(xr: np.ndarray, n: int) -> CMatrix:
    real = 0.5 * (xr[:n, :n] + xr[n:, n:])
    imag = 0.5 * (xr[n:, :n] - xr[:n, n:])
    return real + 1j * imag


def _max_step(x: np.ndarray, dx: np.ndarray) -> float:
    """Largest alpha with X + alpha dX PSD"""
    try:
        lower = scipy.linalg.cholesky(x, lower=True)
    except scipy.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"iterate lost positive definiteness: {e}") from e
    inv = scipy.linalg.solve_triangular(lower, np.eye(x.shape[0]), lower=True)
    m = inv @ dx @ inv.T
    smallest = float(scipy.linalg.eigvalsh(0.5 * (m + m.T))[0])
    return math.inf if smallest >= 0.0 else -1.0 / smallest


def _nt_scaling(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """W with W Z W = X"""
    try:
        lower = scipy.linalg.cholesky(x, lower=True)
    except scipy.linalg.LinAlgError as e:
        raise NumericalBreakdownError(f"primal iterate lost positive definiteness: {e}") from e
    values, vectors = scipy.linalg.eigh(lower.T @ z @ lower)
    if values[0] <= 0.0:
        raise NumericalBreakdownError("dual iterate lost positive definiteness")
    half = lower @ vectors / np.sqrt(values)
    return half @ half.T


def _solve_schur(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(m)):
        raise NumericalBreakdownError("Schur complement has non-finite entries")
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(m), rhs)
    except scipy.linalg.LinAlgError:
        logger.debug("Cholesky of the Schur complement failed, falling back to LU")
    try:
        return scipy.linalg.lu_solve(scipy.linalg.lu_factor(m), rhs)
    except (scipy.linalg.LinAlgError, ValueError) as e:
        raise NumericalBreakdownError(f"Schur complement is singular: {e}") from e


def _solve_real(
    c: np.ndarray, a: np.ndarray, b: np.ndarray, max_iterations: int, gap_tol: float
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Infeasible-start primal-dual path following with Nesterov-Todd scaling.

    ``a`` stacks the constraint matrices, shape (m, n, n). Returns (X, y, iterations).
    """
    n = c.shape[0]
    x = np.eye(n)
    z = np.eye(n)
    y = np.zeros(a.shape[0])

    for iteration in range(1, max_iterations + 1):
        primal_res = b - np.einsum("kij,ij->k", a, x)
        dual_res = np.einsum("k,kij->ij", y, a) - c - z
        value = float(np.sum(c * x))
        dual_value = float(b @ y)
        mu = float(np.sum(x * z)) / n
        if (
            np.linalg.norm(primal_res) <= FEASIBILITY_TOL * (1.0 + np.linalg.norm(b))
            and np.linalg.norm(dual_res) <= FEASIBILITY_TOL * (1.0 + np.linalg.norm(c))
            and abs(value - dual_value) <= gap_tol * (1.0 + abs(value))
        ):
            return x, y, iteration

        w = _nt_scaling(x, z)
        waw = w[None] @ a @ w[None]
        flat = a.reshape(a.shape[0], -1)
        schur = flat @ waw.reshape(a.shape[0], -1).T
        z_inv = scipy.linalg.inv(z)

        def direction(sigma: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
            rc = sigma * mu * z_inv - x
            rhs = np.einsum("kij,ji->k", a, rc - w @ dual_res @ w) - primal_res
            dy = _solve_schur(schur, rhs)
            dz = np.einsum("k,kij->ij", dy, a) + dual_res
            dx = rc - w @ dz @ w
            dx = 0.5 * (dx + dx.T)
            return dx, dy, dz

        # predictor fixes sigma, corrector takes the step
        dx, dy, dz = direction(0.0)
        step_p = min(1.0, _max_step(x, dx))
        step_d = min(1.0, _max_step(z, dz))
        mu_aff = float(np.sum((x + step_p * dx) * (z + step_d * dz))) / n
        sigma = min(1.0, (mu_aff / mu) ** 3) if mu > 0 else 0.0

        dx, dy, dz = direction(sigma)
        step_p = min(1.0, STEP_FRACTION * _max_step(x, dx))
        step_d = min(1.0, STEP_FRACTION * _max_step(z, dz))
        x = x + step_p * dx
        y = y + step_d * dy
        z = z + step_d * dz
        x, z = 0.5 * (x + x.T), 0.5 * (z + z.T)

    raise MaxIterationsError(f"SDP did not converge in {max_iterations} iterations")


def sdp_solve(problem: SdpProblem, max_iterations: Optional[int] = None, gap_tol: Optional[float] = None) -> SdpSolution:
    """Solve a dense Hermitian SDP; complex data is solved through its real embedding"""
    settings = get_settings()
    max_iterations = settings.sdp_max_iterations if max_iterations is None else max_iterations
    gap_tol = settings.sdp_gap_tol if gap_tol is None else gap_tol
    n = problem.dim
    b = np.array([bi for _, bi in problem.constraints], dtype=np.float64)
    if problem.is_real:
        c = problem.objective.real
        a = np.stack([ai.real for ai, _ in problem.constraints]) if problem.constraints else np.zeros((0, n, n))
        x, y, iterations = _solve_real(c, a, b, max_iterations, gap_tol)
        x_complex = x.astype(np.complex128)
    else:
        # <H1, H2> = <R(H1), R(H2)> / 2 under the real embedding
        c = _realify(problem.objective)
        a = np.stack([_realify(ai) for ai, _ in problem.constraints])
        x, y, iterations = _solve_real(c, a, 2.0 * b, max_iterations, gap_tol)
        x_complex = _derealify(x, n)
    value = float(np.real(np.vdot(problem.objective, x_complex)))
    dual_value = float(b @ y)
    gap = abs(value - dual_value)
    logger.debug(f"SDP of size {n} solved in {iterations} iterations, value {value:.9f}, gap {gap:.2e}")
    return SdpSolution(x=x_complex, value=value, dual_value=dual_value, gap=gap, iterations=iterations, y=y)


def theta_problem(g: Graph) -> SdpProblem:
    """max <J, X> subject to tr X = 1 and X_ij = 0 on edges"""
    n = g.n
    constraints = [(np.eye(n), 1.0)]
    for i, j in sorted(g.edges):
        a = np.zeros((n, n))
        a[i, j] = a[j, i] = 0.5
        constraints.append((a, 0.0))
    return SdpProblem(objective=np.ones((n, n)), constraints=tuple(constraints))


def lovasz_theta(g: Graph) -> float:
    if g.n > MAX_THETA_VERTICES:
        raise TooLargeError(f"theta SDP is limited to {MAX_THETA_VERTICES} vertices, got {g.n}")
    if g.n == 0:
        return 0.0
    solution = sdp_solve(theta_problem(g))
    logger.info(f"theta of a graph on {g.n} vertices with {len(g.edges)} edges: {solution.value:.9f}")
    return solution.value


# ---------------------------------------------------------------------------
# Witnesses for operator systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ThetaWitness:
    """Hermitian K orthogonal to S with I + K PSD; certifies theta(S) >= value"""

    n: int
    k: np.ndarray
    value: float

    def to_payload(self) -> "ThetaWitnessPayload":
        return ThetaWitnessPayload(n=self.n, k=MatrixPayload.from_matrix(self.k), value=self.value)


class ThetaWitnessPayload(BaseModel):
    n: int = Field(ge=1)
    k: MatrixPayload
    value: float

    def to_witness(self) -> ThetaWitness:
        k = self.k.to_matrix()
        value = float(scipy.linalg.eigvalsh(np.eye(self.n) + hermitian_part(k))[-1])
        return ThetaWitness(n=self.n, k=k, value=value)


def verify_theta_witness(system: OperatorSystem, k: CMatrix, tol: Tolerance = DEFAULT_TOL) -> ThetaWitness:
    """Check K in S-perp and I + K PSD; the value is the largest eigenvalue of I + K"""
    k = as_cmatrix(k)
    check_hermitian(k)
    if k.shape[0] != system.n:
        raise AmbientMismatchError(f"witness is {k.shape[0]}x{k.shape[0]}, system lives in M_{system.n}")
    leak = float(np.linalg.norm(system.space.project(k)))
    if leak > PERP_MEMBERSHIP_TOL * max(1.0, float(np.linalg.norm(k))):
        raise NotInPerpError(f"witness has a component of norm {leak:.3e} inside S")
    shifted = np.eye(system.n) + hermitian_part(k)
    report = is_psd(shifted, tol)
    if not report:
        raise NotPSDError(f"I + K has eigenvalue {report.min_eigenvalue:.3e}")
    value = float(scipy.linalg.eigvalsh(shifted)[-1])
    return ThetaWitness(n=system.n, k=hermitian_part(k), value=value)


def sk_theta_witness(k: int) -> ThetaWitness:
    """diag(k-1, -1, ..., -1), the value-k witness for S_k"""
    witness = -np.eye(k, dtype=np.complex128)
    witness[0, 0] = k - 1
    return verify_theta_witness(sk_system(k), witness)


def tensor_theta_witness(
    s1: OperatorSystem, w1: ThetaWitness, s2: OperatorSystem, w2: ThetaWitness
) -> Tuple[OperatorSystem, ThetaWitness]:
    """(I + K1) (x) (I + K2) - I, a witness of value v1 v2 for S1 (x) S2"""
    product = tensor(s1, s2)
    k = kron(np.eye(s1.n) + w1.k, np.eye(s2.n) + w2.k) - np.eye(product.n)
    return product, verify_theta_witness(product, k)


def _hermitian_perp_directions(system: OperatorSystem) -> np.ndarray:
    basis = system.perp.basis
    herm = []
    for b in basis:
        herm.append(b + dagger(b))
        herm.append(1j * (b - dagger(b)))
    return np.stack(herm) if herm else np.zeros((0, system.n, system.n), dtype=np.complex128)


def _direction_value(h: CMatrix) -> Tuple[float, float]:
    """(1 + lmax/|lmin|, 1/|lmin|) for the longest PSD step along h"""
    values = scipy.linalg.eigvalsh(hermitian_part(h))
    if values[0] >= 0.0:
        return 1.0, 0.0
    return 1.0 + values[-1] / -values[0], 1.0 / -values[0]


def perp_theta_witness_search(
    system: OperatorSystem, samples: int = 200, seed: Optional[int] = None
) -> ThetaWitness:
    """Best witness along random Hermitian directions in S-perp; a certified lower bound only"""
    seed = get_settings().default_seed if seed is None else seed
    directions = _hermitian_perp_directions(system)
    if directions.shape[0] == 0:
        return verify_theta_witness(system, np.zeros((system.n, system.n)))
    rng = np.random.default_rng(seed)
    best_value, best_k = 1.0, np.zeros((system.n, system.n), dtype=np.complex128)
    for _ in range(samples):
        h = np.einsum("c,cij->ij", rng.standard_normal(directions.shape[0]), directions)
        value, step = _direction_value(h)
        if value > best_value:
            best_value, best_k = value, step * hermitian_part(h)
    witness = verify_theta_witness(system, best_k)
    logger.info(f"random perp search: theta >= {witness.value:.6f} from {samples} directions")
    return witness


class HeuristicCheck(BaseModel):
    """Sampled evidence for an upper bound; never a certificate"""

    label: Literal["heuristic"] = "heuristic"
    claim: str
    samples: int
    max_value: float
    holds: bool


def theta_sk_upper_heuristic(k: int, samples: int = 500, seed: Optional[int] = None) -> HeuristicCheck:
    """Sample traceless diagonals: 1 + lmax/|lmin| never exceeds k"""
    seed = get_settings().default_seed if seed is None else seed
    rng = np.random.default_rng(seed)
    directions = _hermitian_perp_directions(sk_system(k))
    best = 1.0
    for _ in range(samples):
        h = np.einsum("c,cij->ij", rng.standard_normal(directions.shape[0]), directions)
        best = max(best, _direction_value(h)[0])
    return HeuristicCheck(claim=f"theta(S_{k}) <= {k}", samples=samples, max_value=best, holds=best <= k + 1e-9)


# ---------------------------------------------------------------------------
# beta below theta on S_k (x) S_{k^2}
# ---------------------------------------------------------------------------


class SeparationChecks(BaseModel):
    k: int
    block_membership_residual: float
    equal_diagonal_residual: float
    diagonal_sum_residual: float
    gram_rank: int
    beta_upper: int
    theta_lower: float
    beta_verified: bool
    separated: bool


@dataclass(frozen=True, eq=False)
class SeparationResult:
    system: OperatorSystem
    gram: GramBlockMatrix
    beta_certificate: ParamCertificate
    theta_witness: ThetaWitness
    checks: SeparationChecks


def clock_and_shift(k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Shift S e_i = e_{i+1 mod k^2} and clock diag(w^j) with w = exp(2 pi i / k)"""
    size = k * k
    shift = np.roll(np.eye(size, dtype=np.complex128), 1, axis=0)
    omega = np.exp(2j * np.pi / k)
    clock = np.diag(omega ** np.arange(size))
    return shift, clock


def betabetter_construction(k: int) -> SeparationResult:
    """beta(S_k (x) S_{k^2}) <= k^2 while theta(S_k (x) S_{k^2}) >= k^3.

    u_{kr+i} = S^{kr+i} D^r for 0 <= r, i < k; B = U*U with U = (u_0 ... u_{k^2-1})
    is read as k x k blocks of size k^3 and B/k is a beta Gram certificate.
    """
    if not 2 <= k <= 4:
        raise ValueError(f"the construction is limited to 2 <= k <= 4, got {k}")
    size = k * k
    shift, clock = clock_and_shift(k)
    u = [
        np.linalg.matrix_power(shift, k * r + i) @ np.linalg.matrix_power(clock, r)
        for r in range(k)
        for i in range(k)
    ]
    big_u = np.concatenate(u, axis=1)
    b = dagger(big_u) @ big_u

    inner = sk_system(size)
    membership = max(inner.space.residual(dagger(p) @ q) for p in u for q in u)

    block = k * size
    equal_diag = 0.0
    for r in range(k):
        for s in range(k):
            outer = b[r * block:(r + 1) * block, s * block:(s + 1) * block]
            first = outer[:size, :size]
            for i in range(1, k):
                sub = outer[i * size:(i + 1) * size, i * size:(i + 1) * size]
                equal_diag = max(equal_diag, float(np.max(np.abs(sub - first))))
    diag_sum = sum(b[r * block:(r + 1) * block, r * block:(r + 1) * block] for r in range(k))
    sum_residual = float(np.max(np.abs(diag_sum - k * np.eye(block))))

    system = tensor(sk_system(k), inner)
    gram = GramBlockMatrix.uniform(b / k, block)
    certificate = verify_eta_certificate(system, gram, mode="beta")
    _, witness = tensor_theta_witness(sk_system(k), sk_theta_witness(k), inner, sk_theta_witness(size))

    checks = SeparationChecks(
        k=k,
        block_membership_residual=membership,
        equal_diagonal_residual=equal_diag,
        diagonal_sum_residual=sum_residual,
        gram_rank=numerical_rank(b),
        beta_upper=certificate.value,
        theta_lower=witness.value,
        beta_verified=certificate.verified,
        separated=certificate.verified and certificate.value < witness.value - 1e-9,
    )
    logger.info(
        f"k = {k}: beta <= {checks.beta_upper}, theta >= {checks.theta_lower:.6f}, "
        f"residuals {membership:.1e}/{equal_diag:.1e}/{sum_residual:.1e}"
    )
    return SeparationResult(system=system, gram=gram, beta_certificate=certificate, theta_witness=witness, checks=checks)


# ---------------------------------------------------------------------------
# Capacity report
# ---------------------------------------------------------------------------


class CapacityReport(BaseModel):
    kind: Literal["graph", "channel"]
    n: int
    alpha: int
    alpha_exact: bool
    shannon_lower: List[float]
    shannon_upper: Optional[float] = None
    theta: Optional[float] = None
    theta_kind: Literal["sdp", "witness-lower-bound"]
    bounds: BoundsReport
    consistency: List[str] = Field(default_factory=list)
    consistent: bool = True
    notes: List[str] = Field(default_factory=list)


def _alpha_of_system(system: OperatorSystem, effort: str, seed: Optional[int]) -> int:
    """Standard-basis alpha, raised by searches; quick effort tries one size past it"""
    best = standard_basis_alpha(system).value
    budget, starts = (None, None) if effort == "full" else (QUICK_ALPHA_BUDGET, QUICK_ALPHA_STARTS)
    while best < system.n:
        found = alpha_search(system, best + 1, seed=seed, budget=budget, starts=starts)
        if isinstance(found, NotFound):
            logger.info(f"no independent set of size {best + 1} found in M_{system.n}")
            break
        best += 1
        if effort != "full":
            break
    return best


def capacity_report(
    target: Union[QuantumChannel, Graph],
    effort: Literal["quick", "full"] = "quick",
    seed: Optional[int] = None,
) -> CapacityReport:
    """alpha <= Theta <= beta, plus theta where it is available"""
    notes: List[str] = []
    consistency: List[str] = []
    consistent = True

    if isinstance(target, Graph):
        g = target
        system = graph_system(g)
        alpha = independence_number(g)
        r_max = 1
        while g.n ** (r_max + 1) <= 40 and r_max < 3:
            r_max += 1
        shannon = shannon_capacity_lower(g, r_max)
        theta = lovasz_theta(g)
        theta_kind = "sdp"
        alpha_exact = True
        if g.n <= 20:
            chi = chromatic_number(complement(g))
            ok = alpha - 1e-5 <= theta <= chi + 1e-5
            consistency.append(f"alpha {alpha} <= theta {theta:.6f} <= chi(G^c) {chi}: {'ok' if ok else 'FAILED'}")
            consistent &= ok
    else:
        system = confusability_system(target)
        alpha = _alpha_of_system(system, effort, seed)
        alpha_exact = False
        shannon = [float(alpha)]
        squared = tensor(system, system)
        if squared.n <= 9 or effort == "full":
            squared_alpha = _alpha_of_system(squared, effort, seed)
            shannon.append(math.sqrt(squared_alpha))
            if squared_alpha < squared.n:
                notes.append(f"alpha(S (x) S) >= {squared_alpha}; no larger independent set found by search")
        theta = perp_theta_witness_search(system, seed=seed).value
        theta_kind = "witness-lower-bound"
        notes.append("comparisons with the quantum Lovász number require theta-tilde, which is out of scope")

    bounds = bounds_report(system, effort=effort, seed=seed)
    beta_upper = bounds.interval("beta").upper.value
    alpha_interval = bounds.interval("alpha")
    if alpha_interval.upper.value is not None and alpha_interval.upper.value == alpha:
        alpha_exact = True
    lower = max(shannon)
    upper_candidates = [float(beta_upper)] if beta_upper is not None else []
    if theta_kind == "sdp":
        upper_candidates.append(theta)
    shannon_upper = min(upper_candidates) if upper_candidates else None

    if shannon_upper is not None:
        ok = lower <= shannon_upper + 1e-5
        consistency.append(f"Theta lower {lower:.6f} <= Theta upper {shannon_upper:.6f}: {'ok' if ok else 'FAILED'}")
        consistent &= ok
    ok = alpha <= lower + 1e-9
    consistency.append(f"alpha {alpha} <= Theta lower {lower:.6f}: {'ok' if ok else 'FAILED'}")
    consistent &= ok
    chain = [bounds.interval(p) for p in ("alpha", "beta", "gamma", "inter")]
    for lo, hi in zip(chain, chain[1:]):
        if lo.lower.value is not None and hi.upper.value is not None:
            ok = lo.lower.value <= hi.upper.value
            consistency.append(f"{lo.parameter} lower <= {hi.parameter} upper: {'ok' if ok else 'FAILED'}")
            consistent &= ok
    if not consistent:
        logger.error(f"capacity report is inconsistent: {consistency}")

    return CapacityReport(
        kind="graph" if isinstance(target, Graph) else "channel",
        n=system.n,
        alpha=alpha,
        alpha_exact=alpha_exact,
        shannon_lower=shannon,
        shannon_upper=shannon_upper,
        theta=theta,
        theta_kind=theta_kind,
        bounds=bounds,
        consistency=consistency,
        consistent=consistent,
        notes=notes,
    )
