"""Reproduction suite: machine-checked claims about graphs, channels and operator systems.

Each case returns a list of claims with the expected value, the computed value
and the tolerance. ``run_suite`` runs cases concurrently in worker threads and
reports them in registry order.
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple
import asyncio
import logging
import math
import time

import networkx as nx
import numpy as np
from pydantic import BaseModel, Field

from channels import (
    ProjectionTuple,
    confusability_system,
    delta_channel,
    from_classical,
    identity_channel,
    random_channel,
    realize,
    remix,
    two_dim_channel,
)
from config import get_settings
from errors import NCGraphError, UnknownCaseError
from graphs import (
    ClassicalChannel,
    Graph,
    VectorTuple,
    channel_from_sets,
    chromatic_number,
    complement,
    complexity,
    confusability_graph,
    independence_number,
    intersection_graph,
    intersection_number,
    intersection_vectors,
    non_orthogonality_graph,
    non_orthogonality_graph_proj,
    set_representation,
    shannon_capacity_lower,
    strong_product,
)
from numkernel import numerical_rank, perp, principal_angle, random_isometry
from opsys import (
    OperatorSystem,
    angle_between,
    equals,
    graph_system,
    random_operator_system,
    scalar_system,
    sk_system,
    tensor,
)
from params import (
    NotFound,
    ParamCertificate,
    bounds_report,
    chromatic_beta_certificate,
    gram_to_projections,
    inter_certificate,
    projections_to_gram,
    qinter_search,
    random_h_instance,
    reduce_to_unit_ranks,
    refute_dimension_two,
    replay_certificate,
    standard_basis_alpha,
    two_dim_tensor_gram,
    verify_eta_certificate,
    verify_gamma_certificate,
    verify_noncancelling,
)
from theta import betabetter_construction, capacity_report, lovasz_theta

logger = logging.getLogger(__name__)

CaseStatus = Literal["pass", "fail", "out-of-scope-noted"]


class Claim(BaseModel):
    """One machine-checkable assertion"""

    statement: str
    expected: Any = None
    computed: Any = None
    tolerance: float = 0.0
    passed: bool


class ReproductionCase(BaseModel):
    id: str
    title: str
    status: CaseStatus
    claims: List[Claim] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)
    elapsed: Optional[float] = None


class SuiteReport(BaseModel):
    cases: List[ReproductionCase]
    passed: bool
    generated_at: Optional[str] = None


@dataclass(frozen=True)
class RunOptions:
    seed: int = 0
    budget: Optional[int] = None
    starts: Optional[int] = None
    effort: Literal["quick", "full"] = "quick"

    @classmethod
    def from_settings(cls) -> "RunOptions":
        settings = get_settings()
        return cls(seed=settings.default_seed, effort=settings.effort)


def close(statement: str, expected: float, computed: float, tolerance: float) -> Claim:
    return Claim(
        statement=statement, expected=expected, computed=computed, tolerance=tolerance,
        passed=bool(abs(expected - computed) <= tolerance),
    )


def exact(statement: str, expected: Any, computed: Any) -> Claim:
    return Claim(statement=statement, expected=expected, computed=computed, passed=bool(expected == computed))


def holds(statement: str, computed: bool, detail: Any = None) -> Claim:
    return Claim(statement=statement, expected=True, computed=detail if detail is not None else bool(computed),
                 passed=bool(computed))


def atlas(max_vertices: int, min_vertices: int = 1) -> List[Graph]:
    """All graphs up to isomorphism with the given vertex counts"""
    return [
        Graph.from_networkx(h)
        for h in nx.graph_atlas_g()
        if min_vertices <= h.number_of_nodes() <= max_vertices
    ]


# ---------------------------------------------------------------------------
# Cases
# ---------------------------------------------------------------------------


def case_intersection_roundtrip(options: RunOptions) -> List[Claim]:
    failures, complexity_gaps = [], []
    for g in atlas(5):
        witness = intersection_number(g)
        channel = channel_from_sets(witness.family, outputs=witness.size)
        if confusability_graph(channel) != g or intersection_graph(witness.family) != g:
            failures.append(sorted(g.edges))
        if complexity(g) != witness.size:
            complexity_gaps.append(sorted(g.edges))
    return [
        exact("set families and their channels reproduce every graph on at most 5 vertices", [], failures),
        exact("channel complexity equals the intersection number on every graph on at most 5 vertices",
              [], complexity_gaps),
        exact("intersection number of the pentagon", 5, intersection_number(Graph.cycle(5)).size),
        exact("intersection number of K_{1,3} plus an isolated vertex", 4,
              intersection_number(Graph.from_edges(5, [(0, 1), (0, 2), (0, 3)])).size),
    ]


def case_commuting_projections(options: RunOptions) -> List[Claim]:
    unrealized, non_commuting, too_small = [], [], []
    for g in atlas(5):
        size = intersection_number(g).size
        family = set_representation(g, size)
        if family is None:
            unrealized.append(sorted(g.edges))
            continue
        projections = ProjectionTuple.from_ranges([np.eye(size)[:, sorted(tokens)] for tokens in family])
        if non_orthogonality_graph_proj(projections) != g:
            unrealized.append(sorted(g.edges))
        p = projections.projections
        if any(not np.allclose(p[i] @ p[j], p[j] @ p[i]) for i in range(g.n) for j in range(i + 1, g.n)):
            non_commuting.append(sorted(g.edges))
        if set_representation(g, size - 1) is not None:
            too_small.append(sorted(g.edges))
    return [
        exact("diagonal projections in M_iota realize every graph on at most 5 vertices", [], unrealized),
        exact("the realizing projections commute", [], non_commuting),
        exact("exhaustive search finds no diagonal realization in M_(iota - 1)", [], too_small),
    ]


def case_projection_roundtrip(options: RunOptions) -> List[Claim]:
    rng = np.random.default_rng(options.seed)
    claims = []
    for g, ranks in ((Graph.cycle(5), (2, 1, 1, 2, 1)), (Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), (1, 2, 2, 1))):
        gram = random_h_instance(g, ranks, rng)
        projections = gram_to_projections(gram, g)
        back = projections_to_gram(projections)
        claims.append(exact(f"projections from a Gram matrix realize the graph ({len(g.edges)} edges)",
                            sorted(g.edges), sorted(non_orthogonality_graph_proj(projections).edges)))
        claims.append(exact("ranks survive the Gram round trip", list(ranks), projections.ranks))
        claims.append(holds("the round-trip Gram matrix has rank at most the original",
                            numerical_rank(back.data) <= numerical_rank(gram.data)))
    return claims


def case_rank_reduction(options: RunOptions) -> List[Claim]:
    rng = np.random.default_rng(options.seed)
    claims = []
    instances = [(Graph.cycle(5), (2, 1, 1, 1, 1)), (Graph.cycle(5), (2, 2, 1, 2, 1)),
                 (Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)]), (3, 1, 2, 1))]
    for g, ranks in instances:
        gram = random_h_instance(g, ranks, rng)
        reduced = reduce_to_unit_ranks(gram, g)
        claims.append(exact(f"unit ranks reached from {list(ranks)}", [1] * g.n, list(reduced.block_sizes)))
        claims.append(holds("rank never increases", numerical_rank(reduced.data) <= numerical_rank(gram.data),
                            detail=[numerical_rank(gram.data), numerical_rank(reduced.data)]))
        claims.append(exact("vectors of the reduced Gram matrix realize the graph",
                            sorted(g.edges), sorted(non_orthogonality_graph_proj(gram_to_projections(reduced, g)).edges)))
    return claims


def _remix_claims(rng: np.random.Generator) -> List[Claim]:
    remix_failures, perp_failures = 0, 0
    for _ in range(100):
        n, k = int(rng.integers(2, 5)), int(rng.integers(1, 5))
        m = int(rng.integers(-(-n // k), 5))
        channel = random_channel(rng, n, k, m)
        v = random_isometry(rng, m + int(rng.integers(0, 3)), m)
        system = confusability_system(channel)
        if not equals(system, confusability_system(remix(channel, v))):
            remix_failures += 1
        if principal_angle(perp(perp(system.space)), system.space) >= 1e-7:
            perp_failures += 1
    return [
        exact("remixing Kraus operators keeps the confusability system for 100 channels with n, k <= 4",
              0, remix_failures),
        exact("perp is an involution on those confusability systems", 0, perp_failures),
    ]


def case_realization(options: RunOptions) -> List[Claim]:
    rng = np.random.default_rng(options.seed)
    worst, largest_ratio, failures = 0.0, 0.0, 0
    for n in (2, 3):
        for _ in range(50):
            system = random_operator_system(rng, n)
            channel = realize(system)
            s_phi = confusability_system(channel)
            if s_phi.dim != system.dim:
                failures += 1
                continue
            worst = max(worst, angle_between(s_phi, system))
            largest_ratio = max(largest_ratio, channel.k / (2 * n * n))
    return [
        exact("confusability system dimension matches for 50 random systems in each of M_2 and M_3", 0, failures),
        holds("largest principal angle below 1e-7", worst < 1e-7, detail=worst),
        holds("output dimension at most 2 n^2", largest_ratio <= 1.0, detail=largest_ratio),
    ] + _remix_claims(rng)


def case_gamma_bound(options: RunOptions) -> List[Claim]:
    rng = np.random.default_rng(options.seed + 1)
    rejected, worst_ratio = 0, 0.0
    for n in (2, 3):
        for _ in range(50):
            system = random_operator_system(rng, n)
            cert = verify_gamma_certificate(system, realize(system))
            rejected += not cert.verified
            worst_ratio = max(worst_ratio, cert.value / (2 * n * n))
    return [
        exact("realized channels certify gamma for 50 random systems in each of M_2 and M_3", 0, rejected),
        holds("every certified gamma upper bound is at most 2 n^2", worst_ratio <= 1.0, detail=worst_ratio),
    ]


def _sparse_vectors(rng: np.random.Generator, n: int, k: int) -> VectorTuple:
    v = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) * (rng.random((n, k)) < 0.5)
    for row in v:
        if not np.any(row):
            row[rng.integers(k)] = 1.0
    return VectorTuple(vectors=v)


def case_delta_channels(options: RunOptions) -> List[Claim]:
    rng = np.random.default_rng(options.seed)
    mismatches = 0
    for _ in range(100):
        x = _sparse_vectors(rng, int(rng.integers(2, 6)), int(rng.integers(2, 5)))
        if not equals(confusability_system(delta_channel(x)), graph_system(non_orthogonality_graph(x))):
            mismatches += 1
    return [exact("S of the Delta_x channel equals S_{G(x)} for 100 sparse tuples", 0, mismatches)]


def case_classical_channels(options: RunOptions) -> List[Claim]:
    rng = np.random.default_rng(options.seed)
    mismatches, cancelling = 0, 0
    for _ in range(100):
        inputs, outputs = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        probs = rng.random((outputs, inputs)) * (rng.random((outputs, inputs)) < 0.5)
        probs[rng.integers(outputs, size=inputs), np.arange(inputs)] += 0.1
        channel = ClassicalChannel(probs=probs / probs.sum(axis=0, keepdims=True))
        quantum = from_classical(channel)
        if not equals(confusability_system(quantum), graph_system(confusability_graph(channel))):
            mismatches += 1
        cancelling += not verify_noncancelling(quantum)
    return [
        exact("S of the canonical quantum channel equals S_{G_N} for 100 channels", 0, mismatches),
        exact("canonical channels are non-cancelling", 0, cancelling),
    ]


def case_graph_systems(options: RunOptions) -> List[Claim]:
    alpha_mismatches, gamma_failures = [], []
    for g in atlas(6):
        if standard_basis_alpha(graph_system(g)).value != independence_number(g):
            alpha_mismatches.append(sorted(g.edges))
        cert = verify_gamma_certificate(graph_system(g), delta_channel(intersection_vectors(g)))
        if not cert.verified or cert.value != intersection_number(g).size:
            gamma_failures.append(sorted(g.edges))
    claims = [
        exact("standard-basis alpha of S_G equals alpha(G) on every graph with at most 6 vertices",
              [], alpha_mismatches),
        exact("Delta_x channels of set-family vectors certify gamma(S_G) <= iota(G) on every graph "
              "with at most 6 vertices", [], gamma_failures),
    ]
    pentagon = Graph.cycle(5)
    found = qinter_search(pentagon, 3, seed=options.seed, budget=options.budget, starts=options.starts)
    claims.append(holds("projections in M_3 realize the pentagon", not isinstance(found, NotFound)))
    if not isinstance(found, NotFound):
        vectors = VectorTuple(vectors=np.stack([np.linalg.eigh(p)[1][:, -1] for p in found.witness.projections]))
        cert = verify_gamma_certificate(graph_system(pentagon), delta_channel(vectors))
        claims.append(exact("Delta_x channel certifies gamma of the pentagon at most 3", [True, 3],
                            [cert.verified, cert.value]))
    return claims


def case_two_dim_system(options: RunOptions) -> List[Claim]:
    channel = two_dim_channel()
    s2 = sk_system(2)
    s_phi = confusability_system(channel)
    gram = two_dim_tensor_gram()
    system = tensor(s2, s2)
    cert = verify_eta_certificate(system, gram, mode="gamma")
    diag_sum = sum(gram.block(i, i) for i in range(gram.n_blocks))
    return [
        exact("confusability system has dimension 3", 3, s_phi.dim),
        holds("confusability system equals S_2", angle_between(s_phi, s2) < 1e-7, detail=angle_between(s_phi, s2)),
        holds("the channel is non-cancelling", verify_noncancelling(channel)),
        exact("gamma(S_2) <= 3 and inter(S_2) <= 3", [True, 3],
              [inter_certificate(s2, channel).verified, channel.k]),
        exact("rank of W*W", 8, numerical_rank(gram.data)),
        exact("block span of W*W is S_2 (x) S_2", [True, 9], [cert.verified, system.dim]),
        close("diagonal blocks sum to I_4", 0.0, float(np.max(np.abs(diag_sum - np.eye(4)))), 1e-10),
    ]


def _separation_claims(k: int) -> List[Claim]:
    result = betabetter_construction(k)
    c = result.checks
    return [
        close("products u_p* u_q lie in S_{k^2}", 0.0, c.block_membership_residual, 1e-10),
        close("diagonal sub-blocks agree", 0.0, c.equal_diagonal_residual, 1e-10),
        close("diagonal blocks sum to k I", 0.0, c.diagonal_sum_residual, 1e-10),
        exact("beta certificate value", k * k, c.beta_upper),
        holds("beta certificate verifies", c.beta_verified),
        close("theta witness value", float(k ** 3), c.theta_lower, 1e-8),
        holds("beta upper bound lies strictly below the theta lower bound", c.separated,
              detail=[c.beta_upper, c.theta_lower]),
    ]


def case_separation_k2(options: RunOptions) -> List[Claim]:
    return _separation_claims(2)


def case_separation_k3(options: RunOptions) -> List[Claim]:
    return _separation_claims(3)


def _chain_corpus() -> List[Tuple[str, OperatorSystem]]:
    graphs = [
        ("C5", Graph.cycle(5)),
        ("C4", Graph.cycle(4)),
        ("P4", Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])),
        ("K3", Graph.complete(3)),
        ("empty(3)", Graph.empty(3)),
    ]
    return [(f"S_{name}", graph_system(g)) for name, g in graphs] + [
        ("S_2", sk_system(2)),
        ("C I_2", scalar_system(2)),
    ]


def case_capacity_chain(options: RunOptions) -> List[Claim]:
    violations = []
    for g in atlas(6):
        theta = lovasz_theta(g)
        alpha = independence_number(g)
        chi = chromatic_number(complement(g))
        beta = chromatic_beta_certificate(g)
        if not (alpha - 1e-5 <= theta <= chi + 1e-5 and beta.verified and alpha <= beta.value):
            violations.append(sorted(g.edges))
    claims = [exact("alpha <= theta <= chi(G^c) and alpha <= beta upper on every graph with at most 6 vertices",
                    [], violations)]

    budget = options.budget if options.budget is not None else 40
    starts = options.starts if options.starts is not None else 2
    chain = ["alpha", "beta", "gamma", "inter"]
    broken, unreplayed = [], []
    for name, system in _chain_corpus():
        report = bounds_report(system, effort=options.effort, seed=options.seed, budget=budget, starts=starts)
        intervals = [report.interval(p) for p in chain]
        for item in intervals:
            if item.upper.value is not None and item.lower.value > item.upper.value:
                broken.append(f"{name}: {item.parameter} [{item.lower.value}, {item.upper.value}]")
        for lo, hi in zip(intervals, intervals[1:]):
            if hi.upper.value is not None and lo.lower.value > hi.upper.value:
                broken.append(f"{name}: {lo.parameter} lower above {hi.parameter} upper")
        for payload in report.certificates:
            cert = ParamCertificate.from_payload(payload)
            replayed = replay_certificate(cert, system)
            if not replayed.verified or replayed.value != cert.value:
                unreplayed.append(f"{name}: {cert.parameter}/{cert.direction}/{cert.witness_kind}")
    claims.append(exact("bounds reports respect alpha <= beta <= gamma <= inter", [], broken))
    claims.append(exact("every certificate in the bounds reports replays", [], unreplayed))
    return claims


def case_pentagon(options: RunOptions) -> List[Claim]:
    g = Graph.cycle(5)
    theta = lovasz_theta(g)
    shannon = shannon_capacity_lower(g, 2)
    beta = chromatic_beta_certificate(g)
    return [
        exact("alpha of the pentagon", 2, independence_number(g)),
        exact("alpha of the pentagon squared", 5, independence_number(strong_product(g, g))),
        close("theta of the pentagon", math.sqrt(5.0), theta, 1e-5),
        close("Shannon lower bound at level 2 meets theta", theta, shannon[-1], 1e-5),
        holds("beta upper bound at most 3", beta.verified and beta.value <= 3, detail=beta.value),
    ]


def case_hexagon_complement(options: RunOptions) -> List[Claim]:
    hexagon = Graph.cycle(6)
    report = refute_dimension_two(complement(hexagon))
    return [
        exact("chromatic number of the hexagon", 2, chromatic_number(hexagon)),
        exact("no unit vectors in C^2 realize the hexagon complement", False, report.feasible),
        exact("two disjoint triangles do have a C^2 representation", True,
              refute_dimension_two(complement(Graph.from_edges(6, [(i, j) for i in range(3) for j in range(3, 6)]))).feasible),
    ]


def case_scalar_two(options: RunOptions) -> List[Claim]:
    report = capacity_report(identity_channel(2), effort=options.effort, seed=options.seed)
    b = report.bounds
    values = {p: (b.interval(p).lower.value, b.interval(p).upper.value) for p in ("alpha", "beta", "gamma", "inter")}
    return [
        exact("alpha", 2, report.alpha),
        close("Shannon lower bound", 2.0, max(report.shannon_lower), 1e-12),
        exact("beta, gamma and inter intervals", {p: (2, 2) for p in ("beta", "gamma", "inter")},
              {p: values[p] for p in ("beta", "gamma", "inter")}),
    ]


def case_out_of_scope(options: RunOptions) -> List[Claim]:
    return []


@dataclass(frozen=True)
class CaseEntry:
    title: str
    run: Callable[[RunOptions], List[Claim]]
    notes: Sequence[str] = ()
    out_of_scope: bool = False


REGISTRY: Dict[str, CaseEntry] = {
    "prop-II2": CaseEntry("set families, classical channels and the intersection number", case_intersection_roundtrip),
    "prop-III1": CaseEntry("commuting diagonal projections at the intersection number", case_commuting_projections),
    "prop-III2": CaseEntry("projection tuples and Gram matrices", case_projection_roundtrip),
    "thm-III3": CaseEntry("rank reduction to a vector representation", case_rank_reduction),
    "prop-IV1": CaseEntry("every operator system is a confusability system; Kraus remixing", case_realization),
    "cor-IV2": CaseEntry("gamma of an operator system is at most 2 n^2", case_gamma_bound),
    "prop-IV7": CaseEntry("Delta_x channels", case_delta_channels),
    "remark-IV6": CaseEntry("canonical quantum channels of classical channels", case_classical_channels),
    "thm-IV8": CaseEntry("graph systems: alpha and gamma", case_graph_systems),
    "prop-IV9": CaseEntry("the two-dimensional system S_2", case_two_dim_system),
    "thm-V1": CaseEntry("alpha, theta and beta on small graphs and certified bound chains", case_capacity_chain),
    "thm-V2-k2": CaseEntry("beta below theta, k = 2", case_separation_k2),
    "thm-V2-k3": CaseEntry("beta below theta, k = 3", case_separation_k3),
    "appendix-C5": CaseEntry("the pentagon", case_pentagon),
    "appendix-C6c": CaseEntry("the hexagon and its complement", case_hexagon_complement),
    "appendix-CI2": CaseEntry("the scalar system C I_2", case_scalar_two),
    "appendix-qtheta": CaseEntry(
        "comparisons with the quantum Lovász number",
        case_out_of_scope,
        notes=(
            "theta-tilde(C I_2) = 4 requires theta-tilde, which is out of scope",
            "Theta(S_2) < sqrt(theta-tilde(S_2)) requires theta-tilde, which is out of scope",
            "quantum independence numbers are out of scope",
        ),
        out_of_scope=True,
    ),
}


def run_case(case_id: str, options: Optional[RunOptions] = None, timed: bool = True) -> ReproductionCase:
    """Run one case; library errors become failing claims"""
    if case_id not in REGISTRY:
        raise UnknownCaseError(f"unknown case {case_id!r}; known cases: {', '.join(REGISTRY)}")
    options = options or RunOptions.from_settings()
    entry = REGISTRY[case_id]
    started = time.perf_counter()
    try:
        claims = entry.run(options)
    except NCGraphError as e:
        logger.error(f"case {case_id} raised {type(e).__name__}: {e}")
        claims = [Claim(statement="case runs without errors", expected=None, computed=f"{type(e).__name__}: {e}",
                        passed=False)]
    if entry.out_of_scope:
        status: CaseStatus = "out-of-scope-noted"
    else:
        status = "pass" if all(c.passed for c in claims) else "fail"
    for claim in claims:
        if not claim.passed:
            logger.warning(f"{case_id}: {claim.statement}: expected {claim.expected}, computed {claim.computed}")
    logger.info(f"case {case_id}: {status} ({len(claims)} claims)")
    return ReproductionCase(
        id=case_id,
        title=entry.title,
        status=status,
        claims=claims,
        notes=list(entry.notes),
        elapsed=round(time.perf_counter() - started, 3) if timed else None,
    )


async def run_suite_async(
    case_ids: Sequence[str], options: Optional[RunOptions] = None, timed: bool = True
) -> SuiteReport:
    for case_id in case_ids:
        if case_id not in REGISTRY:
            raise UnknownCaseError(f"unknown case {case_id!r}")
    cases = await asyncio.gather(*(asyncio.to_thread(run_case, c, options, timed) for c in case_ids))
    return SuiteReport(cases=list(cases), passed=all(c.status != "fail" for c in cases))


def run_suite(case_ids: Sequence[str], options: Optional[RunOptions] = None, timed: bool = True) -> SuiteReport:
    """Run cases concurrently; ``["all"]`` expands to the whole registry"""
    ids = list(REGISTRY) if list(case_ids) == ["all"] else list(case_ids)
    return asyncio.run(run_suite_async(ids, options, timed))
