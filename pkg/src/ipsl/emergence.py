"""Growth of a scale-free social network and its conversion into tiers.

A network grown by preferential attachment develops a handful of highly
connected hubs and a broad periphery.  Degree centrality then partitions the
nodes: the most connected become the output (decision-maker) tier, the
peripheral nodes the input tier, and everything in between the hidden tier.
The bipartite projections of that partition become the influence graph the
funding engine runs on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import InfluenceGraph, Tier
from .errors import ConfigurationError, EstimationError, StructureError

__all__ = [
    "UndirectedGraph",
    "TierAssignment",
    "grow_network",
    "degree_distribution",
    "fit_power_law",
    "assign_tiers",
    "to_influence_graph",
    "write_edge_list",
    "read_edge_list",
    "write_tier_csv",
    "read_tier_csv",
]


@dataclass
class UndirectedGraph:
    """A simple undirected graph: no self-loops, no multi-edges.

    Edges are stored as (u, v) pairs with u < v, in deterministic
    construction order.
    """

    n: int
    edges: list[tuple[int, int]]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def validate(self) -> None:
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise StructureError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise StructureError(f"edge ({u}, {v}) outside node range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise StructureError(f"duplicate edge {key}")
            seen.add(key)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        adjacency: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            node = stack.pop()
            for nxt in adjacency[node]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == self.n


def grow_network(n: int, m: int, rng: np.random.Generator) -> UndirectedGraph:
    """Grow an n-node network by preferential attachment with m edges per arrival.

    Starts from a clique on m+1 nodes (which avoids zero-degree attachment
    pathologies), then each arriving node attaches to m distinct existing
    nodes chosen with probability proportional to current degree.  The
    result is connected with exactly m(m+1)/2 + (n-m-1)*m edges.
    """
    if m < 1:
        raise ConfigurationError("m must be >= 1")
    if n <= m:
        raise ConfigurationError("n must be > m")
    edges: list[tuple[int, int]] = []
    for u in range(m + 1):
        for v in range(u + 1, m + 1):
            edges.append((u, v))
    # One entry per unit of degree; sampling an index uniformly from this
    # list is sampling a node proportionally to its degree.
    repeated: list[int] = [node for node in range(m + 1) for _ in range(m)]
    for source in range(m + 1, n):
        targets: list[int] = []
        seen: set[int] = set()
        while len(targets) < m:
            candidate = repeated[int(rng.integers(len(repeated)))]
            if candidate not in seen:
                seen.add(candidate)
                targets.append(candidate)
        for t in targets:
            edges.append((t, source))
        repeated.extend(targets)
        repeated.extend([source] * m)
    return UndirectedGraph(n=n, edges=edges)


def degree_distribution(g: UndirectedGraph) -> dict[int, int]:
    """Map degree -> node count; counts sum to the number of nodes."""
    dist: dict[int, int] = {}
    for d in g.degrees():
        dist[int(d)] = dist.get(int(d), 0) + 1
    return dist


def fit_power_law(dist: dict[int, float], k_min: int = 1) -> float:
    """Estimate the degree-density exponent gamma from a degree->count map.

    Computes the complementary cumulative distribution S(k) = P(K >= k) at
    each distinct degree k >= k_min, fits an ordinary least squares line to
    log S(k) versus log k, and returns gamma = 1 + |slope| (the CCDF of a
    density ~ k^-gamma falls like k^-(gamma-1)).
    """
    if k_min < 1:
        raise ConfigurationError("k_min must be >= 1")
    total = float(sum(dist.values()))
    if total <= 0:
        raise EstimationError("degree distribution is empty")
    ks = sorted(k for k, c in dist.items() if c > 0)
    fit_ks = [k for k in ks if k >= k_min]
    if len(fit_ks) < 3:
        raise EstimationError("need at least 3 distinct degrees >= k_min to fit")
    tail = 0.0
    ccdf: dict[int, float] = {}
    for k in reversed(ks):
        tail += float(dist[k])
        ccdf[k] = tail / total
    xs = np.log(np.array(fit_ks, dtype=float))
    ys = np.log(np.array([ccdf[k] for k in fit_ks]))
    slope = float(np.polyfit(xs, ys, 1)[0])
    return 1.0 + abs(slope)


def _ceil_fraction(fraction: float, n: int) -> int:
    # ceil(fraction * n) guarded against float dust (0.2 * 5 -> 1.0000...02).
    return math.ceil(fraction * n - 1e-9)


@dataclass
class TierAssignment:
    """Partition of graph nodes into the three tiers by degree centrality."""

    tiers: dict[int, Tier]
    f_out: float
    f_in: float

    def nodes_in(self, tier: Tier) -> list[int]:
        return sorted(node for node, t in self.tiers.items() if t is tier)


def assign_tiers(g: UndirectedGraph, f_out: float, f_in: float) -> TierAssignment:
    """Partition nodes by degree: top ceil(f_out*n) -> output, bottom
    ceil(f_in*n) -> input, remainder -> hidden.

    Nodes are ranked by degree descending with ties broken by ascending node
    id; the input block is taken from the end of that same ranking, so no
    input node ever outranks an output node.
    """
    if not (0.0 < f_out < 1.0 and 0.0 < f_in < 1.0):
        raise ConfigurationError("f_out and f_in must be in (0, 1)")
    if f_out + f_in >= 1.0:
        raise ConfigurationError("f_out + f_in must be < 1")
    n_out = _ceil_fraction(f_out, g.n)
    n_in = _ceil_fraction(f_in, g.n)
    if n_out + n_in >= g.n:
        raise ConfigurationError("tier fractions leave no hidden nodes")
    deg = g.degrees()
    ranked = sorted(range(g.n), key=lambda node: (-deg[node], node))
    tiers: dict[int, Tier] = {}
    for node in ranked[:n_out]:
        tiers[node] = Tier.OUTPUT
    for node in ranked[g.n - n_in :]:
        tiers[node] = Tier.INPUT
    for node in ranked[n_out : g.n - n_in]:
        tiers[node] = Tier.HIDDEN
    return TierAssignment(tiers=tiers, f_out=f_out, f_in=f_in)


def to_influence_graph(g: UndirectedGraph, tiers: TierAssignment) -> InfluenceGraph:
    """Project the tiered network onto layered 0/1 weight matrices.

    Input-hidden and hidden-output edges become weight-1 entries; same-tier
    and direct input-output edges are discarded to keep the engine strictly
    feed-forward.  Any input node left with an all-zero row is repaired by
    connecting it to the highest-degree hidden node, and any hidden node
    with an all-zero output row to the highest-degree output node, so the
    layered graph always satisfies the reachability invariant.  Reputations
    start at 1.
    """
    input_nodes = tiers.nodes_in(Tier.INPUT)
    hidden_nodes = tiers.nodes_in(Tier.HIDDEN)
    output_nodes = tiers.nodes_in(Tier.OUTPUT)
    if not input_nodes or not hidden_nodes or not output_nodes:
        raise StructureError("every tier must be non-empty")
    in_index = {node: i for i, node in enumerate(input_nodes)}
    hid_index = {node: i for i, node in enumerate(hidden_nodes)}
    out_index = {node: i for i, node in enumerate(output_nodes)}
    w_ih = np.zeros((len(input_nodes), len(hidden_nodes)))
    w_ho = np.zeros((len(hidden_nodes), len(output_nodes)))
    for u, v in g.edges:
        tu, tv = tiers.tiers[u], tiers.tiers[v]
        if tu is Tier.HIDDEN and tv is Tier.INPUT:
            u, v, tu, tv = v, u, tv, tu
        if tu is Tier.OUTPUT and tv is Tier.HIDDEN:
            u, v, tu, tv = v, u, tv, tu
        if tu is Tier.INPUT and tv is Tier.HIDDEN:
            w_ih[in_index[u], hid_index[v]] = 1.0
        elif tu is Tier.HIDDEN and tv is Tier.OUTPUT:
            w_ho[hid_index[u], out_index[v]] = 1.0
    deg = g.degrees()
    top_hidden = hid_index[max(hidden_nodes, key=lambda node: (deg[node], -node))]
    top_output = out_index[max(output_nodes, key=lambda node: (deg[node], -node))]
    for i in range(len(input_nodes)):
        if w_ih[i].sum() == 0.0:
            w_ih[i, top_hidden] = 1.0
    for h in range(len(hidden_nodes)):
        if w_ho[h].sum() == 0.0:
            w_ho[h, top_output] = 1.0
    graph = InfluenceGraph(w_ih=w_ih, w_ho=w_ho, rep_hid=np.ones(len(hidden_nodes)))
    graph.validate()
    return graph


def write_edge_list(g: UndirectedGraph, path: str | Path) -> None:
    """Write the graph as `u v` pairs under a `# nodes=<n>` header."""
    lines = [f"# nodes={g.n}"]
    for u, v in sorted((min(u, v), max(u, v)) for u, v in g.edges):
        lines.append(f"{u} {v}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path: str | Path) -> UndirectedGraph:
    text = Path(path).read_text()
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("# nodes="):
        raise StructureError(f"{path}: missing `# nodes=<n>` header")
    n = int(lines[0].split("=", 1)[1])
    edges = []
    for line in lines[1:]:
        u, v = line.split()
        edges.append((int(u), int(v)))
    g = UndirectedGraph(n=n, edges=edges)
    g.validate()
    return g


def write_tier_csv(tiers: TierAssignment, path: str | Path) -> None:
    lines = ["node_id,tier"]
    for node in sorted(tiers.tiers):
        lines.append(f"{node},{tiers.tiers[node].value}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_tier_csv(path: str | Path, f_out: float = 0.1, f_in: float = 0.5) -> TierAssignment:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "node_id,tier":
        raise StructureError(f"{path}: missing `node_id,tier` header")
    tiers = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        node, tier = line.split(",")
        tiers[int(node)] = Tier(tier)
    return TierAssignment(tiers=tiers, f_out=f_out, f_in=f_in)
