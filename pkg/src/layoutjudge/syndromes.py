"""Statistical quality syndromes of a drawn graph.

A syndrome is a multiset of numbers that share one geometric interpretation:
edge lengths, pairwise distances, angles between incident edges, projections
onto the principal axes, and the tension between Euclidean and graph
distance.  Together they summarize how orderly a drawing looks without
inspecting it pixel by pixel.

All functions return their multiset as an ascending-sorted float array so
downstream consumers see a deterministic order.  Callers are expected to
hand in normalized layouts (centroid at the origin, mean edge length 1);
the feature pipeline does this automatically.  Only translation/scale
sensitive syndromes care.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLayout, ZeroLengthEdge
from .graph import edge_lengths, pairwise_distances

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PrincipalAxes:
    """Unit eigenvectors of the position covariance, descending variance.

    Signs are canonicalized (first nonzero component positive).  When the
    two variances tie within 1e-12 relative, v1 is the lexicographically
    larger vector, so e.g. a unit grid yields v1=(1,0), v2=(0,1).
    """

    v1: np.ndarray
    v2: np.ndarray
    var1: float
    var2: float


def _canonical_sign(v):
    for c in v:
        if c != 0.0:
            return v if c > 0.0 else -v
    return v


def principal_axes(layout):
    """Principal axes of the vertex positions. Raises DegenerateLayout when
    every vertex sits on the same point (zero covariance)."""
    pos = layout.positions
    centered = pos - pos.mean(axis=0)
    cov = centered.T @ centered / pos.shape[0]
    if float(np.trace(cov)) <= 0.0:
        raise DegenerateLayout("zero covariance: all positions coincide")
    evals, evecs = np.linalg.eigh(cov)
    v1 = _canonical_sign(evecs[:, 1].copy())
    v2 = _canonical_sign(evecs[:, 0].copy())
    lam1, lam2 = float(evals[1]), float(evals[0])
    if abs(lam1 - lam2) <= 1e-12 * max(abs(lam1), abs(lam2), 1.0):
        if tuple(v1) < tuple(v2):
            v1, v2 = v2, v1
        lam1 = lam2 = (lam1 + lam2) / 2.0
    v1.flags.writeable = False
    v2.flags.writeable = False
    return PrincipalAxes(v1, v2, lam1, lam2)


def princomp(layout):
    """Centered projections onto the two principal axes (two syndromes)."""
    axes = principal_axes(layout)
    centered = layout.positions - layout.positions.mean(axis=0)
    return np.sort(centered @ axes.v1), np.sort(centered @ axes.v2)


def angular(graph, layout):
    """Angles between consecutive incident edges around each vertex.

    A vertex of degree k >= 2 contributes the k circular gaps between its
    edge directions (they sum to 2*pi); a degree-1 vertex contributes the
    single full turn 2*pi; isolated vertices contribute nothing.
    """
    pos = layout.positions
    if graph.m and (edge_lengths(graph, layout) == 0.0).any():
        raise ZeroLengthEdge("layout contains a zero-length edge")
    out = []
    for v in range(graph.n):
        nbrs = graph.neighbors(v)
        if nbrs.size == 0:
            continue
        if nbrs.size == 1:
            out.append(TWO_PI)
            continue
        vec = pos[nbrs] - pos[v]
        ang = np.sort(np.arctan2(vec[:, 1], vec[:, 0]))
        gaps = np.diff(ang, append=ang[0] + TWO_PI)
        out.extend(gaps.tolist())
    return np.sort(np.asarray(out, dtype=np.float64))


def edge_length(graph, layout):
    """Euclidean length of every edge."""
    return np.sort(edge_lengths(graph, layout))


def rdf_global(layout):
    """Euclidean distance for every unordered vertex pair."""
    return np.sort(pairwise_distances(layout))


def rdf_local(graph, layout, d):
    """Pairwise Euclidean distances restricted to graph distance <= d.

    d=1 reproduces edge_length; any d at or above the diameter reproduces
    rdf_global.  Requires a connected graph.
    """
    if d < 1:
        raise ValueError("neighborhood bound must be a positive integer")
    dmat = graph.distance_matrix()
    iu, ju = np.triu_indices(graph.n, k=1)
    keep = dmat[iu, ju] <= d
    delta = layout.positions[iu[keep]] - layout.positions[ju[keep]]
    return np.sort(np.hypot(delta[:, 0], delta[:, 1]))


def tension(graph, layout):
    """Euclidean over graph-theoretic distance per unordered pair."""
    dmat = graph.distance_matrix().astype(np.float64)
    iu, ju = np.triu_indices(graph.n, k=1)
    return np.sort(pairwise_distances(layout) / dmat[iu, ju])


def all_syndromes(graph, layout, local_bounds=()):
    """Every named syndrome as a dict; local_bounds adds RDF_LOCAL_<d> keys."""
    p1, p2 = princomp(layout)
    out = {
        "PRINCOMP1": p1,
        "PRINCOMP2": p2,
        "ANGULAR": angular(graph, layout),
        "EDGE_LENGTH": edge_length(graph, layout),
        "RDF_GLOBAL": rdf_global(layout),
        "TENSION": tension(graph, layout),
    }
    for d in local_bounds:
        out[f"RDF_LOCAL_{d}"] = rdf_local(graph, layout, d)
    return out
