import networkx as nx
import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from channels import ProjectionTuple, QuantumChannel, delta_channel, identity_channel, two_dim_channel
from errors import (
    BlockSizeMismatchError,
    BlockTooSmallError,
    NotInFError,
    NotInHError,
    ShapeMismatchError,
    UnsupportedCertificateError,
    VertexCountMismatchError,
)
from graphs import (
    Graph,
    VectorTuple,
    complement,
    independence_number,
    intersection_number,
    intersection_vectors,
    non_orthogonality_graph,
    non_orthogonality_graph_proj,
    set_representation,
)
from numkernel import numerical_rank, orthonormalize, random_unitary
from opsys import conjugate, full_system, graph_system, scalar_system, sk_system, tensor
from params import (
    GramBlockMatrix,
    NotFound,
    ParamCertificate,
    RankOneWitness,
    alpha_search,
    bounds_report,
    check_f_membership,
    chromatic_beta_certificate,
    classical_inter_certificate,
    gamma_search,
    gram_of_channel,
    gram_to_projections,
    graph_of_system,
    qinter_search,
    random_h_instance,
    rank_one_in_subspace,
    rank_reduction_step,
    reduce_to_unit_ranks,
    refute_dimension_two,
    replay_certificate,
    standard_basis_alpha,
    transform_conjugate,
    transform_direct_sum,
    transform_tensor,
    two_dim_tensor_gram,
    vector_representation,
    verify_beta_certificate,
    verify_eta_certificate,
    verify_gamma_certificate,
    verify_independent_set,
    verify_noncancelling,
)

SMALL_GRAPHS = [Graph.from_networkx(h) for h in nx.graph_atlas_g() if 1 <= h.number_of_nodes() <= 6]
HEXAGON_COMPLEMENT = Graph.from_edges(6, [(i, j) for i in range(6) for j in range(i + 2, 6) if (i, j) != (0, 5)])


# alpha


def test_verify_independent_set():
    assert verify_independent_set(scalar_system(3), VectorTuple(vectors=np.eye(3)))
    assert not verify_independent_set(sk_system(2), VectorTuple(vectors=np.eye(2)))


@pytest.mark.parametrize("g", SMALL_GRAPHS[::3])
def test_standard_basis_alpha_on_graph_systems(g):
    cert = standard_basis_alpha(graph_system(g))
    assert cert.verified
    assert cert.value == independence_number(g)


def test_alpha_search_finds_orthonormal_bases():
    result = alpha_search(scalar_system(3), 3, seed=0)
    assert isinstance(result, ParamCertificate)
    assert result.verified and result.value == 3


def test_alpha_search_reports_budget_on_failure(s2):
    result = alpha_search(s2, 2, seed=0, budget=20, starts=2)
    assert isinstance(result, NotFound)
    assert not result.exact
    assert (result.budget, result.starts) == (20, 2)


def test_rank_one_exact_two_by_two(s2):
    assert isinstance(rank_one_in_subspace(s2.perp), NotFound)
    assert rank_one_in_subspace(s2.perp).exact

    space = orthonormalize([np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [0.0, 0.0]])])
    found = rank_one_in_subspace(space)
    assert isinstance(found, RankOneWitness)
    assert found.exact and found.ratio < 1e-7
    assert space.contains_matrix(found.matrix)


def test_rank_one_search_in_traceless_matrices():
    found = rank_one_in_subspace(scalar_system(3).perp, seed=0)
    assert isinstance(found, RankOneWitness)
    assert found.ratio < 1e-7
    with pytest.raises(ShapeMismatchError):
        rank_one_in_subspace(orthonormalize([np.ones((2, 3))]))


# beta, gamma and inter


def test_channel_certificates(s2):
    gamma = verify_gamma_certificate(s2, two_dim_channel())
    assert gamma.verified and gamma.value == 3
    rejected = verify_gamma_certificate(s2, identity_channel(2))
    assert not rejected.verified
    assert rejected.notes
    beta = verify_beta_certificate(s2, identity_channel(2))
    assert beta.verified and beta.value == 2


def test_noncancelling():
    assert verify_noncancelling(two_dim_channel())
    hadamard = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    assert not verify_noncancelling(QuantumChannel(kraus=hadamard[None]))
    phases = np.diag([1.0, 1j])
    assert verify_noncancelling(QuantumChannel(kraus=phases[None]))


def test_graph_certificates(pentagon):
    inter = classical_inter_certificate(pentagon)
    assert inter.verified and inter.value == 5
    beta = chromatic_beta_certificate(pentagon)
    assert beta.verified and beta.value == 3


def test_gram_certificates(s2):
    gram = two_dim_tensor_gram()
    diag_sum = sum(gram.block(i, i) for i in range(gram.n_blocks))
    assert np.allclose(diag_sum, np.eye(4), atol=1e-12)
    assert numerical_rank(gram.data) == 8
    cert = verify_eta_certificate(tensor(s2, s2), gram, mode="gamma")
    assert cert.verified and cert.value == 8

    channel_gram = gram_of_channel(two_dim_channel())
    assert verify_eta_certificate(s2, channel_gram, mode="gamma").value == 3
    with pytest.raises(BlockSizeMismatchError):
        verify_eta_certificate(tensor(s2, s2), GramBlockMatrix.uniform(np.eye(4), 2))


def test_gamma_search_modes(s2):
    beta = gamma_search(s2, 2, seed=0, mode="beta")
    assert isinstance(beta, ParamCertificate) and beta.verified
    scalar = gamma_search(scalar_system(2), 2, seed=0)
    assert isinstance(scalar, ParamCertificate) and scalar.verified
    full = gamma_search(full_system(2), 1, seed=0)
    assert isinstance(full, ParamCertificate) and full.value == 1


def test_gamma_search_cannot_beat_beta(s2):
    result = gamma_search(s2, 1, seed=0, budget=30, starts=2, mode="beta")
    assert isinstance(result, NotFound)


def test_certificate_transforms(rng, s2):
    cert = verify_gamma_certificate(s2, two_dim_channel())
    product, squared = transform_tensor(cert, s2, cert, s2)
    assert squared.verified and squared.value == 9
    summed, both = transform_direct_sum(cert, s2, cert, s2)
    assert both.verified and both.value == 6 and summed.n == 4
    moved, conj = transform_conjugate(cert, s2, random_unitary(rng, 2))
    assert conj.verified and moved.dim == 3


def test_certificate_payload_replays(s2):
    cert = verify_gamma_certificate(s2, two_dim_channel())
    restored = ParamCertificate.from_payload(cert.to_payload())
    assert restored.witness_kind == "channel"
    assert replay_certificate(restored, s2).verified


# projections and Gram matrices


def test_f_membership_violations(rng, pentagon):
    gram = random_h_instance(pentagon, (1, 1, 1, 1, 1), rng)
    check_f_membership(gram, pentagon)
    with pytest.raises(NotInFError) as excinfo:
        check_f_membership(gram, Graph.complete(5))
    assert excinfo.value.condition == "zero pattern"


def test_gram_to_projections(rng, pentagon):
    gram = random_h_instance(pentagon, (2, 1, 1, 2, 1), rng)
    projections = gram_to_projections(gram, pentagon)
    assert projections.ranks == [2, 1, 1, 2, 1]
    assert non_orthogonality_graph_proj(projections) == pentagon


def test_rank_reduction_needs_identity_blocks(rng, pentagon):
    gram = random_h_instance(pentagon, (2, 1, 1, 1, 1), rng)
    doubled = GramBlockMatrix(data=2.0 * gram.data, block_sizes=gram.block_sizes)
    with pytest.raises(NotInHError):
        rank_reduction_step(doubled, pentagon, 0)


rank_instances = st.sampled_from(
    [Graph.cycle(5), Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]), Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)]),
     Graph.complete(3), Graph.from_edges(5, [(0, 1), (1, 2), (3, 4)])]
)


@seed(21)
@settings(max_examples=100, deadline=None)
@given(g=rank_instances, data=st.data(), rng_seed=st.integers(0, 99))
def test_rank_reduction_step_postconditions(g, data, rng_seed):
    ranks = data.draw(st.lists(st.integers(1, 3), min_size=g.n, max_size=g.n))
    index = data.draw(st.integers(0, g.n - 1))
    ranks[index] = max(ranks[index], 2)
    gram = random_h_instance(g, ranks, np.random.default_rng(rng_seed))
    reduced = rank_reduction_step(gram, g, index)
    expected = list(ranks)
    expected[index] -= 1
    assert list(reduced.block_sizes) == expected
    assert numerical_rank(reduced.data) <= numerical_rank(gram.data)
    check_f_membership(reduced, g)


def test_reduce_to_unit_ranks(rng, pentagon):
    gram = random_h_instance(pentagon, (2, 2, 1, 2, 1), rng)
    reduced = reduce_to_unit_ranks(gram, pentagon)
    assert reduced.block_sizes == (1, 1, 1, 1, 1)
    assert numerical_rank(reduced.data) <= numerical_rank(gram.data)
    assert non_orthogonality_graph_proj(gram_to_projections(reduced, pentagon)) == pentagon


def test_qinter_search(pentagon):
    found = qinter_search(pentagon, 3, seed=0)
    assert isinstance(found, ParamCertificate)
    assert non_orthogonality_graph_proj(found.witness) == pentagon
    assert isinstance(qinter_search(pentagon, 2, seed=0, budget=20, starts=2), NotFound)
    too_wide = qinter_search(pentagon, 2, ranks=[3, 1, 1, 1, 1])
    assert isinstance(too_wide, NotFound) and too_wide.exact


def test_vector_representation(pentagon):
    x = vector_representation(pentagon, 3, seed=0)
    assert x is not None
    assert non_orthogonality_graph(x) == pentagon


# dimension two


@pytest.mark.parametrize(
    "g, feasible",
    [
        (HEXAGON_COMPLEMENT, False),
        (Graph.complete(4), True),
        (Graph.empty(2), True),
        (Graph.empty(3), False),
        (Graph.cycle(4), True),
        (Graph.cycle(5), False),
    ],
)
def test_refute_dimension_two(g, feasible):
    report = refute_dimension_two(g)
    assert report.feasible is feasible
    if feasible:
        assert non_orthogonality_graph(report.vectors) == g
    else:
        assert report.reason


def test_hexagon_complement_fixture():
    assert complement(Graph.cycle(6)) == HEXAGON_COMPLEMENT


# reports


def test_graph_of_system(pentagon, s2):
    assert graph_of_system(graph_system(pentagon)) == pentagon
    assert graph_of_system(s2) is None


def _interval(report, name):
    i = report.interval(name)
    return i.lower.value, i.upper.value


def test_bounds_report_scalar_system():
    report = bounds_report(scalar_system(2), budget=40, starts=2)
    for name in ("alpha", "beta", "gamma", "inter"):
        assert _interval(report, name) == (2, 2)
        assert report.interval(name).exact


def test_bounds_report_full_system():
    report = bounds_report(full_system(2), budget=40, starts=2)
    for name in ("alpha", "beta", "gamma", "inter"):
        assert _interval(report, name) == (1, 1)


def test_bounds_report_two_dim_system(s2):
    report = bounds_report(s2, budget=40, starts=2)
    assert _interval(report, "alpha") == (1, 1)
    assert _interval(report, "beta") == (2, 2)
    lower, upper = _interval(report, "gamma")
    assert lower == 2 and upper <= 3
    assert report.certificates


def test_bounds_report_pentagon(pentagon_system):
    report = bounds_report(pentagon_system, budget=40, starts=2)
    assert report.interval("alpha").lower.value == 2
    assert report.interval("beta").upper.value <= 3
    assert report.interval("gamma").lower.value >= 3
    assert report.interval("inter").upper.value <= 5
    uppers = [report.interval(p).upper.value for p in ("alpha", "beta", "gamma", "inter")]
    assert uppers == sorted(uppers)


def test_bounds_report_is_invariant_under_conjugation(rng, pentagon_system):
    moved = conjugate(pentagon_system, random_unitary(rng, 5))
    report = bounds_report(moved, budget=40, starts=2)
    for name in ("alpha", "beta", "gamma", "inter"):
        lower, upper = _interval(report, name)
        assert upper is None or lower <= upper


@pytest.mark.parametrize("n", range(2, 7))
def test_bounds_report_on_the_atlas(n):
    for h in nx.graph_atlas_g():
        if h.number_of_nodes() != n:
            continue
        system = graph_system(Graph.from_networkx(h))
        report = bounds_report(system, budget=10, starts=1)
        for interval in report.intervals:
            assert interval.upper.value is None or interval.lower.value <= interval.upper.value, sorted(h.edges)
        for payload in report.certificates:
            cert = ParamCertificate.from_payload(payload)
            replayed = replay_certificate(cert, system)
            assert replayed.verified and replayed.value == cert.value, (sorted(h.edges), payload["parameter"])


@pytest.mark.parametrize("g", [g for g in SMALL_GRAPHS if g.n <= 5])
def test_diagonal_projections_at_the_intersection_number(g):
    size = intersection_number(g).size
    family = set_representation(g, size)
    projections = ProjectionTuple.from_ranges([np.eye(size)[:, sorted(tokens)] for tokens in family])
    assert non_orthogonality_graph_proj(projections) == g
    p = projections.projections
    assert all(np.allclose(p[i] @ p[j], p[j] @ p[i]) for i in range(g.n) for j in range(g.n))
    assert set_representation(g, size - 1) is None


@pytest.mark.parametrize("g", SMALL_GRAPHS)
def test_delta_channel_bounds_gamma_of_graph_systems(g):
    x = intersection_vectors(g)
    assert non_orthogonality_graph(x) == g
    cert = verify_gamma_certificate(graph_system(g), delta_channel(x))
    assert cert.verified
    assert cert.value == intersection_number(g).size


def test_unsupported_requests_raise_library_errors(pentagon):
    with pytest.raises(UnsupportedCertificateError):
        replay_certificate(
            ParamCertificate(parameter="alpha", direction="lower", value=1, witness_kind="none"),
            graph_system(pentagon),
        )
    with pytest.raises(VertexCountMismatchError):
        qinter_search(pentagon, 3, ranks=[1, 1])
    gram = random_h_instance(pentagon, (1, 1, 1, 1, 1), np.random.default_rng(0))
    with pytest.raises(BlockTooSmallError):
        rank_reduction_step(gram, pentagon, 0)
