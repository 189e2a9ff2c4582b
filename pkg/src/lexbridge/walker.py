"""node2vec-style random walks over a :class:`KnowledgeGraph`.

Randomness is drawn with numpy outside the kernels, one generator per start
node seeded from ``(seed, node index)``; row ``r`` of that generator's draw is
walk ``r``. The kernels only consume uniforms, so the compiled and pure-Python
paths produce the same walks, and output does not depend on thread scheduling.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._accel import njit


@dataclass(frozen=True)
class WalkConfig:
    walk_length: int = 100
    walks_per_node: int = 10
    p: float = 1.0
    q: float = 1.0
    seed: int = 42

    def __post_init__(self):
        if self.walk_length < 1:
            raise ValueError("walk_length must be >= 1")
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be >= 1")
        if not (self.p > 0 and self.q > 0):
            raise ValueError("p and q must be positive")


@njit
def _is_neighbor(indices, lo, hi, x):
    # neighbor lists are sorted; binary search in indices[lo:hi]
    while lo < hi:
        mid = (lo + hi) // 2
        v = indices[mid]
        if v == x:
            return True
        if v < x:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit
def walk_kernel(indptr, indices, starts, uniforms, inv_p, inv_q, out, lengths):
    """Fill ``out[i]`` with a walk from ``starts[i]``; pad with -1.

    ``uniforms[i, t]`` drives step ``t + 1`` of walk ``i``.
    """
    n_walks, walk_length = out.shape
    max_deg = 0
    for v in range(indptr.shape[0] - 1):
        d = indptr[v + 1] - indptr[v]
        if d > max_deg:
            max_deg = d
    weights = np.empty(max(max_deg, 1), dtype=np.float64)
    uniform_law = inv_p == 1.0 and inv_q == 1.0
    for i in range(n_walks):
        for t in range(walk_length):
            out[i, t] = -1
        cur = starts[i]
        out[i, 0] = cur
        n = 1
        prev = -1
        while n < walk_length:
            lo = indptr[cur]
            hi = indptr[cur + 1]
            deg = hi - lo
            if deg == 0:
                break
            u = uniforms[i, n - 1]
            if prev < 0 or uniform_law:
                j = int(u * deg)
                if j >= deg:
                    j = deg - 1
                nxt = indices[lo + j]
            else:
                plo = indptr[prev]
                phi = indptr[prev + 1]
                total = 0.0
                for j in range(deg):
                    x = indices[lo + j]
                    if x == prev:
                        w = inv_p
                    elif _is_neighbor(indices, plo, phi, x):
                        w = 1.0
                    else:
                        w = inv_q
                    weights[j] = w
                    total += w
                r = u * total
                acc = 0.0
                pick = deg - 1
                for j in range(deg):
                    acc += weights[j]
                    if r < acc:
                        pick = j
                        break
                nxt = indices[lo + pick]
            out[i, n] = nxt
            n += 1
            prev = cur
            cur = nxt
        lengths[i] = n


def _seed_words(seed):
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def _walk_block(indptr, indices, node_ids, config):
    wpn, length = config.walks_per_node, config.walk_length
    starts = np.repeat(np.asarray(node_ids, dtype=np.int64), wpn)
    uniforms = np.empty((len(starts), max(length - 1, 1)), dtype=np.float64)
    base = _seed_words(config.seed)
    for b, v in enumerate(node_ids):
        rng = np.random.default_rng([base, int(v)])
        uniforms[b * wpn:(b + 1) * wpn] = rng.random((wpn, uniforms.shape[1]))
    out = np.empty((len(starts), length), dtype=np.int64)
    lengths = np.empty(len(starts), dtype=np.int64)
    walk_kernel(indptr, indices, starts, uniforms, 1.0 / config.p, 1.0 / config.q, out, lengths)
    return out, lengths


def iter_walk_arrays(graph, config, threads=1, block_nodes=2048):
    """Yield ``(walks, lengths)`` index arrays in start-node order."""
    if len(graph) == 0:
        raise ValueError("cannot generate walks on an empty graph")
    indptr, indices = graph.to_csr()
    n = len(graph)
    blocks = [range(s, min(s + block_nodes, n)) for s in range(0, n, block_nodes)]
    if threads <= 1 or len(blocks) == 1:
        for blk in blocks:
            yield _walk_block(indptr, indices, blk, config)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map preserves order, so output is independent of scheduling
        yield from pool.map(lambda blk: _walk_block(indptr, indices, blk, config), blocks)


def generate_walks(graph, config=WalkConfig(), threads=1):
    """Return ``walks_per_node`` walks per node as lists of node ids.

    Start nodes are visited in lexicographic order; a walk stops early at a
    node with no neighbors.
    """
    nodes = graph.nodes
    walks = []
    for out, lengths in iter_walk_arrays(graph, config, threads=threads):
        for row, ln in zip(out, lengths):
            walks.append([nodes[k] for k in row[:ln]])
    return walks


def write_walks(graph, config, path, threads=1):
    """Write the walk corpus, one space-separated walk per line."""
    nodes = graph.nodes
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for out, lengths in iter_walk_arrays(graph, config, threads=threads):
            for row, ln in zip(out, lengths):
                fh.write(" ".join(nodes[k] for k in row[:ln]))
                fh.write("\n")
                count += 1
    return count
