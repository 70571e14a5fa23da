"""Simple graphs, classical channels and their exact combinatorial parameters.

Vertex sets are bitmasks internally; ``networkx`` supplies clique enumeration
and conversion for callers that want a ``networkx.Graph``.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple
import logging
import math

import networkx as nx
import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from errors import (
    EmptySetError,
    InvalidChannelError,
    NotProjectionError,
    ShapeMismatchError,
    TooLargeError,
    VertexCountMismatchError,
    ZeroProjectionError,
    ZeroVectorError,
)

if TYPE_CHECKING:
    from channels import ProjectionTuple

logger = logging.getLogger(__name__)

MAX_INDEPENDENCE_VERTICES = 40
MAX_CHROMATIC_VERTICES = 20
MAX_INTERSECTION_VERTICES = 10
MAX_SET_SEARCH_VERTICES = 6
NONORTHOGONAL_REL = 1e-10
POSITIVE_MASS = 1e-12


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1"""

    n: int
    edges: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"vertex count must be non-negative, got {self.n}")
        normalized = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"loop at vertex {i} is not allowed")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range for n = {self.n}")
            normalized.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(n=n, edges=frozenset((e[0], e[1]) for e in edges))

    @classmethod
    def from_adjacency(cls, adjacency: np.ndarray) -> "Graph":
        a = np.asarray(adjacency, dtype=bool)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ShapeMismatchError(f"adjacency must be square, got {a.shape}")
        if not np.array_equal(a, a.T) or np.any(np.diag(a)):
            raise ValueError("adjacency must be symmetric with a false diagonal")
        rows, cols = np.nonzero(np.triu(a, 1))
        return cls.from_edges(a.shape[0], zip(rows.tolist(), cols.tolist()))

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        nodes = sorted(g.nodes)
        index = {v: i for i, v in enumerate(nodes)}
        return cls.from_edges(len(nodes), ((index[u], index[v]) for u, v in g.edges if u != v))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n=n, edges=frozenset())

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, ((i, (i + 1) % n) for i in range(n)))

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges:
            a[i, j] = a[j, i] = True
        a.setflags(write=False)
        return a

    @cached_property
    def neighbor_masks(self) -> Tuple[int, ...]:
        masks = [0] * self.n
        for i, j in self.edges:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        return tuple(masks)

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i, j])

    def confusable(self, i: int, j: int) -> bool:
        """i equals j or i ~ j"""
        return i == j or self.adjacent(i, j)

    def degree(self, v: int) -> int:
        return bin(self.neighbor_masks[v]).count("1")

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(sorted(self.edges))
        return g

    def is_isomorphic(self, other: "Graph") -> bool:
        return self.n == other.n and nx.is_isomorphic(self.to_networkx(), other.to_networkx())

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex v renamed perm[v]"""
        return Graph.from_edges(self.n, ((perm[i], perm[j]) for i, j in self.edges))

    def to_payload(self) -> "GraphPayload":
        return GraphPayload(n=self.n, edges=sorted(self.edges))


class GraphPayload(BaseModel):
    """JSON graph: {"n": int, "edges": [[i, j], ...]} with 0-indexed vertices"""

    n: int = Field(ge=0)
    edges: List[Tuple[int, int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _edges_in_range(self) -> "GraphPayload":
        for i, j in self.edges:
            if i == j or not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"invalid edge ({i}, {j}) for n = {self.n}")
        return self

    def to_graph(self) -> Graph:
        return Graph.from_edges(self.n, self.edges)


@dataclass(frozen=True, eq=False)
class ClassicalChannel:
    """Column-stochastic matrix probs[y, x] = p(y|x)"""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64)
        if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
            raise InvalidChannelError(f"probability matrix must be 2-D and non-empty, got {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(p < 0.0):
            raise InvalidChannelError("transition probabilities must be finite and non-negative")
        sums = p.sum(axis=0)
        if np.max(np.abs(sums - 1.0)) > 1e-10:
            raise InvalidChannelError(f"columns must sum to 1, got sums {np.round(sums, 12).tolist()}")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def inputs(self) -> int:
        return self.probs.shape[1]

    @property
    def outputs(self) -> int:
        return self.probs.shape[0]

    def to_payload(self) -> "ClassicalChannelPayload":
        return ClassicalChannelPayload(
            inputs=self.inputs, outputs=self.outputs, probs=self.probs.tolist()
        )


class ClassicalChannelPayload(BaseModel):
    """JSON classical channel; rows are outputs"""

    inputs: int = Field(ge=1)
    outputs: int = Field(ge=1)
    probs: List[List[float]]

    @model_validator(mode="after")
    def _shape(self) -> "ClassicalChannelPayload":
        if len(self.probs) != self.outputs or any(len(row) != self.inputs for row in self.probs):
            raise ValueError("probs must have `outputs` rows of length `inputs`")
        if not all(math.isfinite(v) for row in self.probs for v in row):
            raise ValueError("probabilities must be finite")
        return self

    def to_channel(self) -> ClassicalChannel:
        return ClassicalChannel(probs=np.array(self.probs, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class VectorTuple:
    """n non-zero vectors in C^k, stored as the rows of ``vectors``"""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.complex128)
        if v.ndim != 2:
            raise ShapeMismatchError(f"vectors must be an (n, k) array, got shape {v.shape}")
        norms = np.linalg.norm(v, axis=1)
        if np.any(norms <= 1e-12):
            raise ZeroVectorError(f"vector {int(np.argmin(norms))} has norm <= 1e-12")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def k(self) -> int:
        return self.vectors.shape[1]

    def normalized(self) -> np.ndarray:
        return self.vectors / np.linalg.norm(self.vectors, axis=1, keepdims=True)

    def to_payload(self) -> "VectorTuplePayload":
        return VectorTuplePayload(
            k=self.k,
            vectors=[[(float(z.real), float(z.imag)) for z in row] for row in self.vectors],
        )


class VectorTuplePayload(BaseModel):
    k: int = Field(ge=1)
    vectors: List[List[Tuple[float, float]]]

    @field_validator("vectors")
    @classmethod
    def _finite(cls, vectors):
        if not all(math.isfinite(a) and math.isfinite(b) for row in vectors for a, b in row):
            raise ValueError("vector entries must be finite")
        return vectors

    @model_validator(mode="after")
    def _lengths(self) -> "VectorTuplePayload":
        if not self.vectors or any(len(row) != self.k for row in self.vectors):
            raise ValueError("every vector must have length k")
        return self

    def to_vectors(self) -> VectorTuple:
        data = np.array(self.vectors, dtype=np.float64)
        return VectorTuple(vectors=data[..., 0] + 1j * data[..., 1])


# ---------------------------------------------------------------------------
# Graph operations
# ---------------------------------------------------------------------------


def complement(g: Graph) -> Graph:
    return Graph.from_edges(
        g.n, ((i, j) for i in range(g.n) for j in range(i + 1, g.n) if not g.adjacent(i, j))
    )


def strong_product(g: Graph, h: Graph) -> Graph:
    """Strong product with vertex (a, b) numbered a * h.n + b"""
    edges = []
    for a in range(g.n):
        for b in range(h.n):
            u = a * h.n + b
            for a2 in range(g.n):
                if not g.confusable(a, a2):
                    continue
                for b2 in range(h.n):
                    v = a2 * h.n + b2
                    if v > u and h.confusable(b, b2):
                        edges.append((u, v))
    return Graph.from_edges(g.n * h.n, edges)


def strong_power(g: Graph, r: int) -> Graph:
    if r < 1:
        raise ValueError(f"power must be at least 1, got {r}")
    result = g
    for _ in range(r - 1):
        result = strong_product(result, g)
    return result


def is_subgraph(h: Graph, g: Graph) -> bool:
    """True when every edge of ``h`` is an edge of ``g`` on the same vertex set"""
    if h.n != g.n:
        raise VertexCountMismatchError(f"vertex counts differ: {h.n} vs {g.n}")
    return h.edges <= g.edges


def isolated_vertices(g: Graph) -> Set[int]:
    return {v for v in range(g.n) if g.neighbor_masks[v] == 0}


def intersection_graph(family: Sequence[Iterable[int]]) -> Graph:
    sets = [frozenset(s) for s in family]
    return Graph.from_edges(
        len(sets),
        ((i, j) for i in range(len(sets)) for j in range(i + 1, len(sets)) if sets[i] & sets[j]),
    )


def non_orthogonality_graph(x: VectorTuple) -> Graph:
    """Edge i ~ j iff |<x_j, x_i>| > 1e-10 |x_i| |x_j|"""
    v = x.vectors
    gram = np.abs(v.conj() @ v.T)
    norms = np.linalg.norm(v, axis=1)
    threshold = NONORTHOGONAL_REL * np.outer(norms, norms)
    upper = np.triu(gram > threshold, 1)
    return Graph.from_adjacency(upper | upper.T)


def non_orthogonality_graph_proj(p: "ProjectionTuple") -> Graph:
    """Edge i ~ j iff ||P_i P_j|| > 1e-10"""
    projections = np.asarray(p.projections, dtype=np.complex128)
    for idx, proj in enumerate(projections):
        if np.linalg.norm(proj) <= 1e-10:
            raise ZeroProjectionError(f"projection {idx} is zero")
        defect = max(
            float(np.max(np.abs(proj @ proj - proj))),
            float(np.max(np.abs(proj - proj.conj().T))),
        )
        if defect > 1e-10:
            raise NotProjectionError(f"projection {idx} fails P^2 = P = P* by {defect:.3e}")
    n = projections.shape[0]
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if np.linalg.norm(projections[i] @ projections[j], 2) > NONORTHOGONAL_REL
    ]
    return Graph.from_edges(n, edges)


# ---------------------------------------------------------------------------
# Independence number: max clique in the complement, coloring bounds
# ---------------------------------------------------------------------------


def _color_sort(candidates: int, adj: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Greedy sequential coloring of ``candidates``; returns vertices and their color numbers"""
    order: List[int] = []
    bounds: List[int] = []
    uncolored = candidates
    color = 0
    while uncolored:
        color += 1
        available = uncolored
        while available:
            low = available & -available
            v = low.bit_length() - 1
            available &= ~adj[v] & ~low
            uncolored &= ~low
            order.append(v)
            bounds.append(color)
    return order, bounds


def _maximum_clique(adj: Sequence[int]) -> int:
    """Maximum clique (as a bitmask) of a graph given by neighbor masks"""
    best = [0, 0]  # size, mask

    def expand(candidates: int, size: int, clique: int) -> None:
        order, bounds = _color_sort(candidates, adj)
        for idx in range(len(order) - 1, -1, -1):
            if size + bounds[idx] <= best[0]:
                return
            v = order[idx]
            bit = 1 << v
            grown = clique | bit
            remaining = candidates & adj[v]
            if remaining:
                expand(remaining, size + 1, grown)
            elif size + 1 > best[0]:
                best[0], best[1] = size + 1, grown
            candidates &= ~bit

    if adj:
        expand((1 << len(adj)) - 1, 0, 0)
    return best[1]


def maximum_independent_set(g: Graph) -> List[int]:
    """Exact maximum independent set by branch and bound (n <= 40)"""
    if g.n > MAX_INDEPENDENCE_VERTICES:
        raise TooLargeError(f"independence_number supports n <= {MAX_INDEPENDENCE_VERTICES}, got {g.n}")
    if g.n == 0:
        return []
    full = (1 << g.n) - 1
    comp = [full & ~g.neighbor_masks[v] & ~(1 << v) for v in range(g.n)]
    # relabel so that bit order is degree descending in the searched graph
    order = sorted(range(g.n), key=lambda v: (-bin(comp[v]).count("1"), v))
    position = {v: i for i, v in enumerate(order)}
    relabeled = [0] * g.n
    for v in range(g.n):
        mask = 0
        for u in range(g.n):
            if comp[v] >> u & 1:
                mask |= 1 << position[u]
        relabeled[position[v]] = mask
    clique = _maximum_clique(relabeled)
    return sorted(order[i] for i in range(g.n) if clique >> i & 1)


def independence_number(g: Graph) -> int:
    value = len(maximum_independent_set(g))
    logger.debug(f"independence number of graph with n={g.n}, |E|={len(g.edges)}: {value}")
    return value


def is_independent_set(g: Graph, vertices: Iterable[int]) -> bool:
    vs = list(vertices)
    return all(not g.adjacent(a, b) for i, a in enumerate(vs) for b in vs[i + 1:])


# ---------------------------------------------------------------------------
# Chromatic number
# ---------------------------------------------------------------------------


def _k_coloring(g: Graph, k: int, order: Sequence[int]) -> Optional[List[int]]:
    colors = [-1] * g.n

    def place(idx: int, used: int) -> bool:
        if idx == len(order):
            return True
        v = order[idx]
        forbidden = {colors[u] for u in range(g.n) if g.neighbor_masks[v] >> u & 1 and colors[u] >= 0}
        # a new color is only tried once, as the lowest unused one
        for c in range(min(used + 1, k)):
            if c in forbidden:
                continue
            colors[v] = c
            if place(idx + 1, max(used, c + 1)):
                return True
        colors[v] = -1
        return False

    return colors if place(0, 0) else None


def proper_coloring(g: Graph) -> List[int]:
    """Minimum proper coloring by iterative k-colorability backtracking (n <= 20)"""
    if g.n > MAX_CHROMATIC_VERTICES:
        raise TooLargeError(f"chromatic_number supports n <= {MAX_CHROMATIC_VERTICES}, got {g.n}")
    if g.n == 0:
        return []
    order = sorted(range(g.n), key=lambda v: (-g.degree(v), v))
    lower = 2 if g.edges else 1
    if not g.edges:
        return [0] * g.n
    for k in range(lower, g.n + 1):
        coloring = _k_coloring(g, k, order)
        if coloring is not None:
            return coloring
    raise AssertionError("a graph is always n-colorable")


def chromatic_number(g: Graph) -> int:
    coloring = proper_coloring(g)
    return max(coloring) + 1 if coloring else 0


# ---------------------------------------------------------------------------
# Intersection number: exact edge clique cover plus singleton tokens
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntersectionWitness:
    """Set family R_0..R_{n-1} over tokens 0..size-1 realizing a graph"""

    size: int
    family: Tuple[FrozenSet[int], ...]


def _minimum_edge_clique_cover(g: Graph) -> List[FrozenSet[int]]:
    edges = sorted(g.edges)
    if not edges:
        return []
    edge_index = {e: i for i, e in enumerate(edges)}
    cliques = []
    for clique in nx.find_cliques(g.to_networkx()):
        if len(clique) < 2:
            continue
        mask = 0
        for a in clique:
            for b in clique:
                if a < b:
                    mask |= 1 << edge_index[(a, b)]
        cliques.append((frozenset(clique), mask))
    # largest cliques first keeps the search deterministic and short
    cliques.sort(key=lambda c: (-len(c[0]), sorted(c[0])))
    by_edge = [[c for c in cliques if c[1] >> i & 1] for i in range(len(edges))]
    full = (1 << len(edges)) - 1
    failed: Dict[int, int] = {}

    def search(covered: int, budget: int, chosen: List[FrozenSet[int]]) -> bool:
        if covered == full:
            return True
        if budget == 0 or failed.get(covered, -1) >= budget:
            return False
        uncovered = full & ~covered
        first = (uncovered & -uncovered).bit_length() - 1
        for members, mask in by_edge[first]:
            chosen.append(members)
            if search(covered | mask, budget - 1, chosen):
                return True
            chosen.pop()
        failed[covered] = max(failed.get(covered, -1), budget)
        return False

    for depth in range(1, len(edges) + 1):
        chosen: List[FrozenSet[int]] = []
        if search(0, depth, chosen):
            return chosen
    raise AssertionError("the edge set always covers itself")


def intersection_number(g: Graph) -> IntersectionWitness:
    """Exact intersection number with a witness family (n <= 10)"""
    if g.n > MAX_INTERSECTION_VERTICES:
        raise TooLargeError(f"intersection_number supports n <= {MAX_INTERSECTION_VERTICES}, got {g.n}")
    cover = _minimum_edge_clique_cover(g)
    family: List[Set[int]] = [set() for _ in range(g.n)]
    for token, clique in enumerate(cover):
        for v in clique:
            family[v].add(token)
    token = len(cover)
    for v in sorted(isolated_vertices(g)):
        family[v].add(token)
        token += 1
    witness = IntersectionWitness(size=token, family=tuple(frozenset(s) for s in family))
    logger.debug(f"intersection number of graph with n={g.n}: {witness.size}")
    return witness


def set_representation(g: Graph, size: int) -> Optional[Tuple[FrozenSet[int], ...]]:
    """Non-empty subsets of {0..size-1} with R_u & R_v non-empty exactly on edges, or None.

    Backtracking over vertices in order. Unused tokens are interchangeable, so
    a vertex only opens new tokens as the next contiguous run.
    """
    if g.n > MAX_SET_SEARCH_VERTICES:
        raise TooLargeError(f"set_representation supports n <= {MAX_SET_SEARCH_VERTICES}, got {g.n}")
    if size < 1:
        return None if g.n else ()
    masks: List[int] = []

    def place(v: int, used: int) -> bool:
        if v == g.n:
            return True
        for old in range(1 << used):
            for fresh in range(size - used + 1):
                mask = old | ((1 << fresh) - 1) << used
                if mask == 0:
                    continue
                if all(bool(mask & masks[u]) == g.adjacent(u, v) for u in range(v)):
                    masks.append(mask)
                    if place(v + 1, used + fresh):
                        return True
                    masks.pop()
        return False

    if not place(0, 0):
        return None
    return tuple(frozenset(t for t in range(size) if mask >> t & 1) for mask in masks)


def complexity(g: Graph) -> int:
    """Classical channel complexity, equal to the intersection number"""
    return intersection_number(g).size


# ---------------------------------------------------------------------------
# Classical channels
# ---------------------------------------------------------------------------


def confusability_graph(channel: ClassicalChannel) -> Graph:
    support = channel.probs > POSITIVE_MASS
    shared = support.T.astype(np.int64) @ support.astype(np.int64)
    np.fill_diagonal(shared, 0)
    return Graph.from_adjacency(shared > 0)


def channel_from_sets(family: Sequence[Iterable[int]], outputs: Optional[int] = None) -> ClassicalChannel:
    """Channel with p(y|i) = 1/|R_i| for y in R_i"""
    sets = [sorted(set(s)) for s in family]
    for idx, s in enumerate(sets):
        if not s:
            raise EmptySetError(f"set {idx} of the family is empty")
        if s[0] < 0:
            raise ValueError(f"set {idx} contains a negative element")
    k = max(s[-1] for s in sets) + 1 if outputs is None else outputs
    if any(s[-1] >= k for s in sets):
        raise ValueError(f"family elements must lie below {k}")
    probs = np.zeros((k, len(sets)), dtype=np.float64)
    for i, s in enumerate(sets):
        probs[s, i] = 1.0 / len(s)
    return ClassicalChannel(probs=probs)


def shannon_capacity_lower(g: Graph, r_max: int) -> List[float]:
    """Lower bounds alpha(G^r)^(1/r) on the Shannon capacity for r = 1..r_max"""
    if g.n ** r_max > MAX_INDEPENDENCE_VERTICES:
        raise TooLargeError(
            f"strong power of size {g.n}^{r_max} exceeds the exact solver limit {MAX_INDEPENDENCE_VERTICES}"
        )
    bounds = []
    for r in range(1, r_max + 1):
        alpha = independence_number(strong_power(g, r))
        bounds.append(alpha ** (1.0 / r))
        logger.info(f"lower bound at level {r}: alpha = {alpha}, root = {bounds[-1]:.6f}")
    return bounds


def complement_coloring_vectors(g: Graph) -> "VectorTuple":
    """Standard basis vectors indexed by a minimum coloring of the complement.

    Vertices sharing a color form a clique of ``g``, so the non-orthogonality
    graph of the result is a subgraph of ``g``.
    """
    coloring = proper_coloring(complement(g))
    colors = max(coloring) + 1 if coloring else 1
    vectors = np.zeros((g.n, colors), dtype=np.complex128)
    vectors[np.arange(g.n), coloring] = 1.0
    return VectorTuple(vectors=vectors)


def intersection_vectors(g: Graph) -> "VectorTuple":
    """Indicator vectors of a minimum set family; their non-orthogonality graph is ``g``"""
    witness = intersection_number(g)
    vectors = np.zeros((g.n, max(witness.size, 1)), dtype=np.complex128)
    for v, tokens in enumerate(witness.family):
        vectors[v, sorted(tokens)] = 1.0
    return VectorTuple(vectors=vectors)
