import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from channels import identity_channel, two_dim_channel
from errors import NotInPerpError, NotPSDError, TooLargeError
from graphs import Graph, chromatic_number, complement, independence_number
from opsys import scalar_system, sk_system
from theta import (
    SdpProblem,
    ThetaWitnessPayload,
    betabetter_construction,
    capacity_report,
    lovasz_theta,
    perp_theta_witness_search,
    sdp_solve,
    sk_theta_witness,
    tensor_theta_witness,
    theta_sk_upper_heuristic,
    verify_theta_witness,
)

SMALL_GRAPHS = [Graph.from_networkx(h) for h in nx.graph_atlas_g() if 2 <= h.number_of_nodes() <= 5]


def test_sdp_trace_constraint():
    solution = sdp_solve(SdpProblem(objective=np.diag([1.0, 3.0]), constraints=((np.eye(2), 1.0),)))
    assert solution.value == pytest.approx(3.0, abs=1e-6)
    assert solution.gap < 1e-5


def test_sdp_complex_objective():
    c = np.array([[0.0, 1j], [-1j, 0.0]])
    solution = sdp_solve(SdpProblem(objective=c, constraints=((np.eye(2), 1.0),)))
    assert solution.value == pytest.approx(1.0, abs=1e-6)
    assert np.trace(solution.x).real == pytest.approx(1.0, abs=1e-6)


def test_theta_of_the_pentagon(pentagon):
    assert lovasz_theta(pentagon) == pytest.approx(math.sqrt(5.0), abs=1e-5)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_theta_of_complete_and_empty_graphs(n):
    assert lovasz_theta(Graph.complete(n)) == pytest.approx(1.0, abs=1e-5)
    assert lovasz_theta(Graph.empty(n)) == pytest.approx(float(n), abs=1e-5)


def test_theta_size_limit():
    assert lovasz_theta(Graph.empty(0)) == 0.0
    with pytest.raises(TooLargeError):
        lovasz_theta(Graph.empty(61))


@pytest.mark.parametrize("n", range(1, 8))
def test_theta_sandwich(n):
    violations = []
    for h in nx.graph_atlas_g():
        if h.number_of_nodes() != n:
            continue
        g = Graph.from_networkx(h)
        theta = lovasz_theta(g)
        if not independence_number(g) - 1e-5 <= theta <= chromatic_number(complement(g)) + 1e-5:
            violations.append((sorted(g.edges), theta))
    assert violations == []


@seed(5)
@settings(max_examples=20, deadline=None)
@given(g=st.sampled_from(SMALL_GRAPHS), data=st.data())
def test_theta_drops_when_edges_are_added(g, data):
    missing = sorted(complement(g).edges)
    if not missing:
        return
    extra = data.draw(st.sampled_from(missing))
    bigger = Graph.from_edges(g.n, list(g.edges) + [extra])
    assert lovasz_theta(bigger) <= lovasz_theta(g) + 1e-5


def test_sk_witness_values():
    for k in (2, 3, 4):
        assert sk_theta_witness(k).value == pytest.approx(float(k))


def test_scalar_witness():
    n = 3
    k = -np.eye(n)
    k[0, 0] = n - 1
    assert verify_theta_witness(scalar_system(n), k).value == pytest.approx(3.0)


def test_witness_rejections(s2):
    with pytest.raises(NotInPerpError):
        verify_theta_witness(s2, np.eye(2))
    with pytest.raises(NotPSDError):
        verify_theta_witness(s2, np.diag([-2.0, 2.0]))


def test_zero_witness_is_always_valid(pentagon_system):
    assert verify_theta_witness(pentagon_system, np.zeros((5, 5))).value == pytest.approx(1.0)


def test_tensor_witness_multiplies():
    product, witness = tensor_theta_witness(sk_system(2), sk_theta_witness(2), sk_system(4), sk_theta_witness(4))
    assert product.n == 8
    assert witness.value == pytest.approx(8.0)


def test_witness_payload_round_trip():
    w = sk_theta_witness(3)
    back = ThetaWitnessPayload.model_validate(w.to_payload().model_dump()).to_witness()
    assert back.value == pytest.approx(w.value)
    assert np.allclose(back.k, w.k)


def test_perp_search_is_a_lower_bound(s2):
    witness = perp_theta_witness_search(s2, samples=20, seed=0)
    assert witness.value == pytest.approx(2.0)
    scalar = perp_theta_witness_search(scalar_system(3), samples=50, seed=0)
    assert 1.0 <= scalar.value <= 3.0 + 1e-9


def test_heuristic_is_labelled():
    check = theta_sk_upper_heuristic(3, samples=100, seed=0)
    assert check.label == "heuristic"
    assert check.holds
    assert check.max_value <= 3.0 + 1e-9


@pytest.mark.parametrize("k", [2, 3])
def test_beta_separates_from_theta(k):
    result = betabetter_construction(k)
    checks = result.checks
    assert checks.block_membership_residual < 1e-10
    assert checks.equal_diagonal_residual < 1e-10
    assert checks.diagonal_sum_residual < 1e-10
    assert checks.beta_verified
    assert checks.beta_upper == k * k
    assert checks.theta_lower == pytest.approx(float(k ** 3))
    assert checks.separated


def test_separation_range():
    with pytest.raises(ValueError):
        betabetter_construction(5)


def test_capacity_report_for_the_pentagon(pentagon):
    report = capacity_report(pentagon)
    assert report.kind == "graph"
    assert report.alpha == 2 and report.alpha_exact
    assert report.theta == pytest.approx(math.sqrt(5.0), abs=1e-5)
    assert report.shannon_lower[-1] == pytest.approx(math.sqrt(5.0))
    assert report.shannon_upper == pytest.approx(math.sqrt(5.0), abs=1e-5)
    assert report.consistent


def test_capacity_report_for_a_channel():
    report = capacity_report(identity_channel(2))
    assert report.kind == "channel"
    assert report.theta_kind == "witness-lower-bound"
    assert report.alpha == 2
    assert report.shannon_upper == 2.0
    assert report.consistent
    assert report.notes


def test_capacity_report_searches_the_tensor_square():
    report = capacity_report(two_dim_channel(), effort="quick", seed=0)
    assert report.alpha == 1
    assert report.shannon_lower == [1.0, 1.0]
    assert any("alpha(S (x) S) >= 1" in note for note in report.notes)
    assert report.consistent
