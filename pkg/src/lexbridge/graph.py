"""Knowledge graph store: an undirected semantic network of synset nodes.

Edges carry a kind tag (``relation`` or ``gloss``). Gloss edges come from
linking a synset to the synsets found in its disambiguated gloss; the walker
treats both kinds the same.
"""
import json
import logging
from pathlib import Path

import numpy as np

from .errors import DataError

logger = logging.getLogger(__name__)

RELATION = "relation"
GLOSS = "gloss"
EDGE_KINDS = (RELATION, GLOSS)


def _key(u, v):
    return (u, v) if u <= v else (v, u)


class KnowledgeGraph:
    """Immutable undirected graph with kind-tagged edges.

    Parameters
    ----------
    nodes : iterable of str, optional
        Extra nodes to include (isolated unless an edge touches them).
    edges : mapping of (str, str) -> kind, optional
        Undirected edges; keys need not be canonically ordered.
    """

    def __init__(self, nodes=(), edges=None):
        edge_map = {}
        node_set = set()
        for n in nodes:
            if not n:
                raise ValueError("node ids must be non-empty")
            node_set.add(n)
        for (u, v), kind in (edges or {}).items():
            if kind not in EDGE_KINDS:
                raise ValueError(f"unknown edge kind {kind!r}")
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            k = _key(u, v)
            # relation wins over gloss when both are present
            if edge_map.get(k) != RELATION:
                edge_map[k] = kind
            node_set.add(u)
            node_set.add(v)
        self._edges = edge_map
        self._nodes = tuple(sorted(node_set))
        self._index = {n: i for i, n in enumerate(self._nodes)}
        adj = {n: [] for n in self._nodes}
        for u, v in edge_map:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = {n: tuple(sorted(nb)) for n, nb in adj.items()}
        self.info = {}

    @classmethod
    def from_pairs(cls, pairs, kind=RELATION, nodes=()):
        return cls(nodes=nodes, edges={_key(u, v): kind for u, v in pairs})

    @property
    def nodes(self):
        """Node ids in lexicographic order."""
        return self._nodes

    @property
    def edges(self):
        """Dict of canonical ``(u, v)`` with ``u < v`` to edge kind."""
        return dict(self._edges)

    def index(self, node):
        return self._index[node]

    def neighbors(self, node):
        return self._adj[node]

    def has_edge(self, u, v):
        return _key(u, v) in self._edges

    def edge_kind(self, u, v):
        return self._edges.get(_key(u, v))

    def degree(self, node):
        return len(self._adj[node])

    def __len__(self):
        return len(self._nodes)

    def __contains__(self, node):
        return node in self._index

    def __eq__(self, other):
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __repr__(self):
        return f"KnowledgeGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"

    def num_edges(self, kind=None):
        if kind is None:
            return len(self._edges)
        return sum(1 for k in self._edges.values() if k == kind)

    def to_csr(self):
        """Adjacency as CSR arrays over node indices; neighbor lists sorted."""
        n = len(self._nodes)
        indptr = np.zeros(n + 1, dtype=np.int64)
        for i, node in enumerate(self._nodes):
            indptr[i + 1] = indptr[i] + len(self._adj[node])
        indices = np.empty(indptr[-1], dtype=np.int64)
        for i, node in enumerate(self._nodes):
            indices[indptr[i]:indptr[i + 1]] = [self._index[x] for x in self._adj[node]]
        return indptr, indices


def read_pairs(path):
    """Parse an edge-list file into ``(pairs, self_loops)``.

    Blank lines and lines starting with ``#`` are skipped. A line with other
    than two tokens raises :class:`DataError` with its line number.
    """
    pairs = []
    self_loops = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise DataError(f"expected 2 node ids, got {len(parts)}", path, lineno)
            u, v = parts
            if u == v:
                self_loops += 1
                continue
            pairs.append((u, v))
    if self_loops:
        logger.warning("%s: rejected %d self-loop line(s)", path, self_loops)
    return pairs, self_loops


def load_edge_list(path, kind=RELATION):
    pairs, self_loops = read_pairs(path)
    graph = KnowledgeGraph.from_pairs(pairs, kind=kind)
    graph.info = {"source": str(path), "self_loops_rejected": self_loops}
    logger.info("loaded %s: %d nodes, %d edges", path, len(graph), graph.num_edges())
    return graph


def merge_edges(graph, pairs, kind=GLOSS):
    """Union ``pairs`` (tagged ``kind``) into a copy of ``graph``."""
    edges = graph.edges
    for u, v in pairs:
        k = _key(u, v)
        if k not in edges:
            edges[k] = kind
    merged = KnowledgeGraph(nodes=graph.nodes, edges=edges)
    merged.info = dict(graph.info)
    return merged


def merge_gloss_edges(graph, gloss_links):
    """Add gloss edges read from ``gloss_links`` to ``graph``.

    An edge already present as a relation keeps kind ``relation``. Endpoints
    missing from the graph are added as new nodes. Edge counts before and
    after the merge are logged and kept in ``merged.info``.
    """
    pairs, self_loops = read_pairs(gloss_links)
    before = graph.num_edges()
    merged = merge_edges(graph, pairs, GLOSS)
    after = merged.num_edges()
    merged.info.update({
        "edges_before_gloss": before,
        "edges_after_gloss": after,
        "gloss_self_loops_rejected": self_loops,
    })
    ratio = after / before if before else float("inf")
    logger.info("gloss merge: %d -> %d edges (x%.2f)", before, after, ratio)
    return merged


def graph_stats(graph):
    degrees = np.array([graph.degree(n) for n in graph.nodes], dtype=np.int64)
    n = len(graph)
    return {
        "nodes": n,
        "edges": graph.num_edges(),
        "edges_by_kind": {k: graph.num_edges(k) for k in EDGE_KINDS},
        "degree_min": int(degrees.min()) if n else 0,
        "degree_mean": float(degrees.mean()) if n else 0.0,
        "degree_max": int(degrees.max()) if n else 0,
        "isolated": int((degrees == 0).sum()),
    }


def stats_json(graph):
    return json.dumps(graph_stats(graph), sort_keys=True)


def load_graph(edges_path, gloss_path=None):
    graph = load_edge_list(Path(edges_path), RELATION)
    if gloss_path is not None:
        graph = merge_gloss_edges(graph, Path(gloss_path))
    return graph
