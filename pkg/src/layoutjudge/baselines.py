"""Reference judges built from classic layout-quality measures.

Two baseline discriminators live here: one ranks a pair of drawings by
scale-invariant stress alone, the other by a weighted sum of z-scored
readability metrics (crossings, crossing angle, adjacent-edge angle, edge
length spread) with weights fitted on labeled pairs.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .discriminator import verdict_from_t
from .engines import normalize_layout
from .errors import EmptyInput, ZeroLengthEdge
from .graph import edge_lengths
from .rng import substream

# collinearity / touch tolerance for the crossing predicates
CROSSING_EPS = 1e-12
# edge pairs are tested for intersection in row blocks of this many edges,
# which bounds the broadcast workspace to blocksize * m entries
_CROSSING_BLOCK = 256


def stress_at_scale(graph, layout, scale):
    """Stress of the drawing when graph distances are mapped to `scale` units.

    Sums (1/d_hop^2) * (d_euclid - scale * d_hop)^2 over unordered vertex
    pairs. Raises DisconnectedGraph when hop distances are undefined.
    """
    dmat = graph.distance_matrix().astype(np.float64)
    iu, ju = np.triu_indices(graph.n, k=1)
    hop = dmat[iu, ju]
    diff = layout.positions[iu] - layout.positions[ju]
    euclid = np.hypot(diff[:, 0], diff[:, 1])
    return float((((euclid - scale * hop) / hop) ** 2).sum())


def scale_invariant_stress(graph, layout):
    """Minimum stress over all scales, on the canonically normalized drawing.

    The drawing is first normalized (centroid at the origin, mean edge length
    one), which makes the result invariant under translation, rotation, and
    uniform scaling of the input. Stress is then sampled at three scales
    around the mean ratio of euclidean to hop distance, the exact quadratic
    through the samples is recovered, and its minimum value is returned,
    clamped at zero.
    """
    layout = normalize_layout(layout, graph)
    dmat = graph.distance_matrix().astype(np.float64)
    iu, ju = np.triu_indices(graph.n, k=1)
    hop = dmat[iu, ju]
    diff = layout.positions[iu] - layout.positions[ju]
    euclid = np.hypot(diff[:, 0], diff[:, 1])
    center = float((euclid / hop).mean())
    if center == 0.0:
        return float(((euclid / hop) ** 2).sum())
    scales = np.array([0.5 * center, center, 2.0 * center])
    values = [float((((euclid - s * hop) / hop) ** 2).sum()) for s in scales]
    quad = np.polyfit(scales, values, 2)
    vertex_value = quad[2] - quad[1] ** 2 / (4.0 * quad[0])
    return max(0.0, float(vertex_value))


# ----------------------------------------------------------- quality metrics


@dataclass(frozen=True)
class QualityMetrics:
    """Classic readability measures of one drawing.

    cc: number of crossing edge pairs; cr: minimum acute crossing angle in
    radians (pi/2 when nothing crosses); ar: minimum angle between adjacent
    edges (full turn when no vertex has two); el: population stddev of edge
    lengths.
    """

    cc: int
    cr: float
    ar: float
    el: float

    def as_array(self):
        return np.array([float(self.cc), self.cr, self.ar, self.el])


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _crossing_block(p1, vec, rows, eligible):
    """Intersection mask for the edge pairs (rows x all); touches count."""
    qp = p1[None, :, :] - p1[rows, None, :]
    denom = _cross2(vec[rows, None, :], vec[None, :, :])
    tnum = _cross2(qp, vec[None, :, :])
    unum = _cross2(qp, vec[rows, None, :])
    skew = np.abs(denom) > CROSSING_EPS
    safe = np.where(skew, denom, 1.0)
    t = tnum / safe
    u = unum / safe
    lo, hi = -CROSSING_EPS, 1.0 + CROSSING_EPS
    hit_skew = (t >= lo) & (t <= hi) & (u >= lo) & (u <= hi)
    # parallel pairs: collinear and with overlapping projections
    rr = (vec[rows] ** 2).sum(axis=1)[:, None]
    t0 = (qp * vec[rows, None, :]).sum(axis=2) / rr
    t1 = t0 + (vec[None, :, :] * vec[rows, None, :]).sum(axis=2) / rr
    t_lo = np.minimum(t0, t1)
    t_hi = np.maximum(t0, t1)
    hit_par = (np.abs(unum) <= CROSSING_EPS) & (t_hi >= lo) & (t_lo <= hi)
    return np.where(skew, hit_skew, hit_par) & eligible


def _crossings(edges, pos):
    """Count crossing edge pairs and the minimum acute angle among them."""
    m = edges.shape[0]
    if m < 2:
        return 0, math.pi / 2
    p1 = pos[edges[:, 0]]
    vec = pos[edges[:, 1]] - p1
    norm = np.hypot(vec[:, 0], vec[:, 1])
    count = 0
    min_angle = math.pi / 2
    for start in range(0, m, _CROSSING_BLOCK):
        rows = np.arange(start, min(start + _CROSSING_BLOCK, m))
        # strictly later edges that share no endpoint with the row edge
        later = np.arange(m)[None, :] > rows[:, None]
        shared = (
            (edges[rows, 0, None] == edges[None, :, 0])
            | (edges[rows, 0, None] == edges[None, :, 1])
            | (edges[rows, 1, None] == edges[None, :, 0])
            | (edges[rows, 1, None] == edges[None, :, 1])
        )
        hits = _crossing_block(p1, vec, rows, later & ~shared)
        block_count = int(hits.sum())
        if block_count:
            count += block_count
            ri, ci = np.nonzero(hits)
            cosang = np.abs(
                (vec[rows[ri]] * vec[ci]).sum(axis=1)
            ) / (norm[rows[ri]] * norm[ci])
            angles = np.arccos(np.clip(cosang, -1.0, 1.0))
            min_angle = min(min_angle, float(angles.min()))
    return count, min_angle if count else math.pi / 2


def _min_adjacent_angle(graph, pos):
    """Smallest gap between consecutive edge directions at any deg >= 2 vertex."""
    best = 2.0 * math.pi
    for v in range(graph.n):
        nbrs = graph.neighbors(v)
        if nbrs.size < 2:
            continue
        vec = pos[nbrs] - pos[v]
        ang = np.sort(np.arctan2(vec[:, 1], vec[:, 0]))
        gaps = np.diff(ang, append=ang[0] + 2.0 * math.pi)
        best = min(best, float(gaps.min()))
    return best


def quality_metrics(graph, layout):
    """Crossing count, crossing angle, adjacent-edge angle, and length spread.

    Crossings are counted over edge pairs that share no endpoint; touching
    or overlapping segments count as crossings. Raises ZeroLengthEdge when
    any edge has coincident endpoints.
    """
    lengths = edge_lengths(graph, layout)
    if graph.m and (lengths == 0.0).any():
        raise ZeroLengthEdge("edge with coincident endpoints")
    cc, cr = _crossings(graph.edges, layout.positions)
    ar = _min_adjacent_angle(graph, layout.positions)
    el = float(np.std(lengths)) if graph.m else 0.0
    return QualityMetrics(cc=cc, cr=cr, ar=ar, el=el)


# ------------------------------------------------------ combined-metric judge


@dataclass(frozen=True)
class CombWeights:
    """Fitted weights of the combined-metric judge, one per quality measure."""

    w_cc: float
    w_cr: float
    w_ar: float
    w_el: float

    def __post_init__(self):
        if not np.isfinite(self.as_array()).all():
            raise ValueError("weights must be finite")

    def as_array(self):
        return np.array([self.w_cc, self.w_cr, self.w_ar, self.w_el])


def pair_zscores(metrics_a, metrics_b):
    """Per-metric z-scores of a two-layout set.

    Standardizing two values with the population stddev collapses to the
    sign of their difference, and to zero where they agree.
    """
    za = np.sign(metrics_a.as_array() - metrics_b.as_array())
    return za, -za


def comb_t(weights, metrics_a, metrics_b):
    """Signed comparison score: negative when the first drawing wins."""
    za, zb = pair_zscores(metrics_a, metrics_b)
    return float(weights.as_array() @ (za - zb))


def _sign_matrix(metrics_a, metrics_b):
    raw_a = np.array([q.as_array() for q in metrics_a])
    raw_b = np.array([q.as_array() for q in metrics_b])
    return np.sign(raw_a - raw_b)


def _pair_accuracy(za, label_sign, w):
    """Fraction predicted correctly; undecided pairs earn half credit."""
    pred = np.sign(za @ w)
    decided = pred != 0
    return float(
        ((pred == label_sign) & decided).sum() + 0.5 * (~decided).sum()
    ) / za.shape[0]


def fit_sign_weights(za, label_sign, seed=0, restarts=10, iterations=200):
    """Fit metric weights to a precomputed per-pair sign matrix.

    Runs Nelder-Mead from several seeded unit-sphere starts on the (piecewise
    constant) training accuracy and keeps the best candidate; the all-zero
    weight vector is retained as the floor, scoring one half by the
    undecided-pair convention.
    """
    za = np.asarray(za, dtype=np.float64)
    label_sign = np.asarray(label_sign, dtype=np.float64)
    if za.shape[0] == 0:
        raise EmptyInput("no training pairs")

    best_score = _pair_accuracy(za, label_sign, np.zeros(4))
    best_w = np.zeros(4)
    rng = substream(seed, "comb-fit")
    for _ in range(restarts):
        direction = rng.normal(size=4)
        x0 = direction / np.linalg.norm(direction)
        result = minimize(
            lambda w: -_pair_accuracy(za, label_sign, w),
            x0,
            method="Nelder-Mead",
            options={"maxiter": iterations, "xatol": 1e-4, "fatol": 1e-12},
        )
        # the objective is even in scale but odd in orientation, so the
        # mirrored candidate is free to test
        for cand in (result.x, -result.x):
            score = _pair_accuracy(za, label_sign, cand)
            if score > best_score:
                best_score = score
                best_w = np.array(cand)
    return CombWeights(*[float(x) for x in best_w])


def comb_fit_weights(metrics_a, metrics_b, labels, seed=0, restarts=10,
                     iterations=200):
    """Fit the metric weights by direct accuracy maximization over pairs."""
    if len(metrics_a) == 0:
        raise EmptyInput("no training pairs")
    if not (len(metrics_a) == len(metrics_b) == len(labels)):
        raise ValueError("metric and label counts differ")
    za = _sign_matrix(metrics_a, metrics_b)
    label_sign = np.sign(np.asarray(labels, dtype=np.float64))
    return fit_sign_weights(za, label_sign, seed=seed, restarts=restarts,
                            iterations=iterations)


def comb_discriminate(weights, graph, lay_a, lay_b):
    """Judge a pair by the combined metric; ties go to B with zero confidence."""
    qa = quality_metrics(graph, lay_a)
    qb = quality_metrics(graph, lay_b)
    return verdict_from_t(comb_t(weights, qa, qb))


def stress_discriminate(graph, lay_a, lay_b):
    """Judge a pair by scale-invariant stress; lower stress wins.

    The score is the normalized stress difference in [-1, 1], negative when
    the first drawing is better. Invariant under rotation, translation, and
    uniform scaling of either drawing.
    """
    sa = scale_invariant_stress(graph, lay_a)
    sb = scale_invariant_stress(graph, lay_b)
    total = sa + sb
    t = (sa - sb) / total if total > 0.0 else 0.0
    return verdict_from_t(t)
