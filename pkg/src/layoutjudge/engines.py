"""Layout engines: produce and normalize drawings of a graph.

Proper layouts come from a spring embedder (force_directed) and from stress
majorization (stress_min).  Garbage layouts come from random placement and
from the phantom engine, which draws a *different* random graph of the same
size and transfers its coordinates by vertex index.

normalize_layout is the canonical form used everywhere downstream: centroid
at the origin and mean edge length exactly one.  Rotation is intentionally
not removed.
"""

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLayout, DisconnectedGraph
from .graph import Graph, Layout, edge_lengths
from .rng import substream


@dataclass(frozen=True)
class LayoutParams:
    """Knobs shared by the iterative engines."""

    seed: int = 0
    iterations: int = 300
    tolerance: float = 1e-7


def normalize_layout(layout, graph):
    """Translate the centroid to the origin and scale mean edge length to 1.

    Idempotent up to floating point noise.  Raises DegenerateLayout when the
    graph has no edges or every edge has length zero.
    """
    if graph.m == 0:
        raise DegenerateLayout("normalization needs at least one edge")
    pos = layout.positions - layout.positions.mean(axis=0)
    mel = float(
        np.hypot(*(pos[graph.edges[:, 0]] - pos[graph.edges[:, 1]]).T).mean()
    )
    if mel <= 0.0:
        raise DegenerateLayout("mean edge length is zero")
    return layout.with_positions(pos / mel)


def layout_random(graph, seed, dist="uniform"):
    """Place vertices at random (normalized): dist is 'uniform' or 'normal'."""
    rng = substream(seed, "random-layout", dist)
    if dist == "uniform":
        pos = rng.uniform(0.0, 1.0, size=(graph.n, 2))
    elif dist == "normal":
        pos = rng.normal(0.0, 1.0, size=(graph.n, 2))
    else:
        raise ValueError(f"unknown distribution: {dist!r}")
    return normalize_layout(Layout("g", pos, provenance=dist), graph)


def layout_force_directed(graph, params=LayoutParams()):
    """Spring embedder with all-pairs repulsion and a linear cooling schedule.

    Forces follow the classic spring-electrical model: repulsion k^2/d
    between every vertex pair and attraction d^2/k along edges, with per-step
    displacement capped by a shrinking temperature.
    """
    n = graph.n
    rng = substream(params.seed, "fdp")
    pos = rng.uniform(0.0, 1.0, size=(n, 2))
    if n == 1:
        raise DegenerateLayout("cannot lay out a single vertex")
    k = np.sqrt(1.0 / n)
    ei, ej = graph.edges[:, 0], graph.edges[:, 1]
    t0 = 0.1
    for step in range(params.iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.hypot(delta[..., 0], delta[..., 1])
        np.fill_diagonal(dist, np.inf)
        dist = np.maximum(dist, 1e-12)
        disp = (delta / dist[..., None] * (k * k / dist)[..., None]).sum(axis=1)
        if graph.m:
            dvec = pos[ei] - pos[ej]
            dlen = np.maximum(np.hypot(dvec[:, 0], dvec[:, 1]), 1e-12)
            pull = dvec * (dlen / k)[:, None]
            np.subtract.at(disp, ei, pull)
            np.add.at(disp, ej, pull)
        length = np.maximum(np.hypot(disp[:, 0], disp[:, 1]), 1e-12)
        temp = t0 * (1.0 - step / params.iterations)
        pos = pos + disp / length[:, None] * np.minimum(length, temp)[:, None]
    return normalize_layout(Layout("g", pos, provenance="fdp"), graph)


def _classical_scaling(target):
    """Torgerson embedding of a distance matrix: top-2 eigenpairs of the
    double-centered squared distances.  Exact when the distances are planar."""
    d2 = target**2
    b = -0.5 * (
        d2
        - d2.mean(axis=0, keepdims=True)
        - d2.mean(axis=1, keepdims=True)
        + d2.mean()
    )
    evals, evecs = np.linalg.eigh(b)
    return evecs[:, -2:] * np.sqrt(np.maximum(evals[-2:], 0.0))


def _stress(pos, target, weights):
    d = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(d[..., 0], d[..., 1])
    return 0.5 * float((weights * (dist - target) ** 2).sum())


def stress_majorization(graph, seed, iterations=200, tolerance=1e-7):
    """Minimize weighted stress toward graph distances; returns (pos, trace).

    Standard majorization: each step solves the quadratic upper bound, so the
    recorded stress trace never increases.  Weights are 1/d^2, stopping when
    the relative improvement drops below `tolerance` or the iteration budget
    runs out.
    """
    n = graph.n
    target = graph.distance_matrix().astype(np.float64)
    with np.errstate(divide="ignore"):
        weights = 1.0 / target**2
    np.fill_diagonal(weights, 0.0)

    rng = substream(seed, "stress-min")
    pos = _classical_scaling(target)
    spread = float(np.abs(pos).max()) or 1.0
    # seeded jitter breaks exact coincidences and symmetry ties
    pos = pos + rng.uniform(-0.5, 0.5, size=(n, 2)) * (spread * 1e-3)

    lap = np.diag(weights.sum(axis=1)) - weights
    lap_pinv = np.linalg.pinv(lap)

    trace = [_stress(pos, target, weights)]
    for _ in range(iterations):
        d = pos[:, None, :] - pos[None, :, :]
        dist = np.hypot(d[..., 0], d[..., 1])
        np.fill_diagonal(dist, 1.0)
        ratio = np.where(dist > 0, target / dist, 0.0)
        b = -weights * ratio
        np.fill_diagonal(b, 0.0)
        np.fill_diagonal(b, -b.sum(axis=1))
        pos = lap_pinv @ (b @ pos)
        trace.append(_stress(pos, target, weights))
        prev, cur = trace[-2], trace[-1]
        if prev > 0 and (prev - cur) / prev < tolerance:
            break
    return pos, trace


def layout_stress_min(graph, params=LayoutParams(iterations=200)):
    """Stress-majorization layout (normalized). Requires a connected graph."""
    pos, _ = stress_majorization(
        graph, params.seed, iterations=params.iterations, tolerance=params.tolerance
    )
    return normalize_layout(Layout("g", pos, provenance="stress"), graph)


def _random_spanning_tree(n, rng):
    """Uniform random labeled tree via a random sequence decode."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [int(v) for v in rng.integers(0, n, size=n - 2)]
    degree = np.ones(n, dtype=np.int64)
    for v in seq:
        degree[v] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[leaf] -= 1
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    last = [v for v in range(n) if degree[v] == 1]
    edges.append((min(last), max(last)))
    return edges


def layout_phantom(graph, seed, params=None):
    """Coordinates stolen from a layout of a random graph of equal size.

    Builds a random connected graph with the same vertex and edge counts
    (uniform spanning tree plus uniformly drawn extra non-edges), lays it out
    with the spring embedder, and assigns its coordinates by vertex index.
    The result looks locally organic but ignores the actual topology.
    """
    if not graph.is_connected():
        raise DisconnectedGraph("phantom layouts require a connected graph")
    n, m = graph.n, graph.m
    rng = substream(seed, "phantom")
    edges = set(_random_spanning_tree(n, rng))
    max_edges = n * (n - 1) // 2
    if m > max_edges:
        raise ValueError("edge count exceeds simple-graph capacity")
    attempts = 0
    while len(edges) < m:
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        attempts += 1
        if u != v:
            edges.add((min(u, v), max(u, v)))
        if attempts > 200 * (m + 1) and len(edges) < m:
            # dense graph: fall back to enumerating the complement
            iu, ju = np.triu_indices(n, k=1)
            pool = [e for e in zip(iu.tolist(), ju.tolist()) if e not in edges]
            take = rng.choice(len(pool), size=m - len(edges), replace=False)
            edges.update(pool[i] for i in sorted(take.tolist()))
    phantom = Graph(n, sorted(edges))
    inner = params or LayoutParams(seed=seed)
    lay = layout_force_directed(phantom, inner)
    out = Layout("g", lay.positions, provenance="phantom")
    return normalize_layout(out, graph)
