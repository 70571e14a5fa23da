import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from channels import (
    ProjectionTuple,
    QuantumChannel,
    QuantumChannelPayload,
    block_count,
    compress_channel,
    confusability_system,
    conjugate_channel,
    delta_channel,
    direct_sum_channel,
    from_classical,
    identity_channel,
    random_channel,
    realize,
    remix,
    stack_channels,
    tensor,
    tensor_power,
    trace_channel,
    two_dim_channel,
)
from errors import InvalidChannelError, TooManyKrausError
from graphs import ClassicalChannel, VectorTuple, confusability_graph, non_orthogonality_graph
from numkernel import random_isometry, random_unitary
from opsys import (
    angle_between,
    block_sum,
    compress,
    conjugate,
    contains,
    equals,
    full_system,
    graph_system,
    random_operator_system,
    scalar_system,
    sk_system,
    span_union,
    tensor as tensor_system,
)


def test_trace_preservation_is_enforced():
    with pytest.raises(InvalidChannelError):
        QuantumChannel(kraus=np.eye(2)[None] * 0.5)


def test_basic_channels():
    assert equals(confusability_system(identity_channel(3)), scalar_system(3))
    assert equals(confusability_system(trace_channel(3)), full_system(3))
    s_phi = confusability_system(two_dim_channel())
    assert s_phi.dim == 3
    assert angle_between(s_phi, sk_system(2)) < 1e-7


def test_apply_is_trace_preserving(rng):
    channel = random_channel(rng, 3, 2, 4)
    rho = np.diag([0.5, 0.3, 0.2]).astype(complex)
    assert np.trace(channel.apply(rho)) == pytest.approx(1.0)


@pytest.mark.parametrize("dim, m", [(1, 1), (2, 2), (3, 3), (4, 3), (7, 4), (16, 6)])
def test_block_count(dim, m):
    assert block_count(dim) == m


@seed(11)
@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 3), rng_seed=st.integers(0, 2**16))
def test_realize_recovers_the_system(n, rng_seed):
    rng = np.random.default_rng(rng_seed)
    system = random_operator_system(rng, n)
    channel = realize(system)
    s_phi = confusability_system(channel)
    assert s_phi.dim == system.dim
    assert angle_between(s_phi, system) < 1e-7
    assert channel.k <= 2 * n * n


@pytest.mark.parametrize("k", [2, 3])
def test_realize_sk(k):
    assert equals(confusability_system(realize(sk_system(k))), sk_system(k))


@seed(12)
@settings(max_examples=100, deadline=None)
@given(m=st.integers(1, 4), extra=st.integers(0, 3), rng_seed=st.integers(0, 2**16))
def test_remix_keeps_the_confusability_system(m, extra, rng_seed):
    rng = np.random.default_rng(rng_seed)
    channel = random_channel(rng, 2, 2, m)
    v = random_isometry(rng, m + extra, m)
    assert equals(confusability_system(remix(channel, v)), confusability_system(channel))


@seed(13)
@settings(max_examples=100, deadline=None)
@given(rng_seed=st.integers(0, 2**16), n=st.integers(2, 5), k=st.integers(2, 3))
def test_delta_channel_realizes_the_vector_graph(rng_seed, n, k):
    rng = np.random.default_rng(rng_seed)
    v = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) * (rng.random((n, k)) < 0.6)
    v[np.all(v == 0, axis=1), 0] = 1.0
    x = VectorTuple(vectors=v)
    assert equals(confusability_system(delta_channel(x)), graph_system(non_orthogonality_graph(x)))


def test_delta_channel_size_limit():
    with pytest.raises(TooManyKrausError):
        delta_channel(VectorTuple(vectors=np.ones((13, 2))))


def test_classical_channel_lift():
    probs = np.array([[0.5, 0.0, 0.2], [0.5, 0.3, 0.0], [0.0, 0.7, 0.8]])
    channel = ClassicalChannel(probs=probs)
    assert equals(confusability_system(from_classical(channel)), graph_system(confusability_graph(channel)))


@seed(14)
@settings(max_examples=100, deadline=None)
@given(inputs=st.integers(2, 5), outputs=st.integers(1, 5), rng_seed=st.integers(0, 2**16))
def test_classical_lift_matches_the_confusability_graph(inputs, outputs, rng_seed):
    rng = np.random.default_rng(rng_seed)
    probs = rng.random((outputs, inputs)) * (rng.random((outputs, inputs)) < 0.5)
    probs[rng.integers(outputs, size=inputs), np.arange(inputs)] += 0.1
    channel = ClassicalChannel(probs=probs / probs.sum(axis=0, keepdims=True))
    assert equals(confusability_system(from_classical(channel)), graph_system(confusability_graph(channel)))


def test_tensor_channels_multiply(s2):
    phi = two_dim_channel()
    product = tensor(phi, phi)
    assert product.m == 4
    assert product.k == 9
    assert equals(confusability_system(product), tensor_system(s2, s2))
    assert tensor_power(phi, 3).n == 8
    with pytest.raises(ValueError):
        tensor_power(phi, 0)


def test_kraus_limit(monkeypatch):
    monkeypatch.setenv("NCGRAPH_MAX_KRAUS", "8")
    with pytest.raises(TooManyKrausError):
        tensor_power(two_dim_channel(), 4)


def test_transforms_follow_the_system(rng, s2):
    phi = two_dim_channel()
    u = random_unitary(rng, 2)
    assert equals(confusability_system(conjugate_channel(phi, u)), conjugate(s2, u))

    summed = direct_sum_channel(phi, identity_channel(3))
    assert summed.k == 3 + 3
    assert equals(confusability_system(summed), block_sum(s2, scalar_system(3)))

    p = np.diag([1.0, 0.0]).astype(complex)
    assert equals(confusability_system(compress_channel(phi, p)), compress(s2, p))


def test_stacked_channel_spans_the_union(s2):
    measure = QuantumChannel(kraus=np.stack([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]))
    diag = confusability_system(measure)
    stacked = stack_channels(two_dim_channel(), measure)
    assert equals(confusability_system(stacked), span_union(s2, diag))
    assert contains(confusability_system(stacked), s2)


def test_projection_tuple_checks():
    p = ProjectionTuple.from_ranges([np.array([[1.0], [0.0]]), np.eye(2)])
    assert p.ranks == [1, 2]
    assert p.k == 2


def test_channel_payload_round_trip():
    phi = two_dim_channel()
    back = QuantumChannelPayload.model_validate(phi.to_payload().model_dump()).to_channel()
    assert np.allclose(back.kraus, phi.kraus)
