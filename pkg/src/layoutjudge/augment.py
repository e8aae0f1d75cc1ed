"""Layout corruption and pair labeling for training data augmentation.

Four worsening operators degrade a drawing by an amount r in [0, 1]:

* perturb     adds Gaussian noise, sigma = r * RMS radius
* flip_nodes  swaps the coordinates of ceil(r*n/2) random vertex pairs
* flip_edges  swaps the endpoints of ceil(r*m) random edges
* movlsq      warps space with an affine moving-least-squares deformation

interpolate blends two layouts of the same graph linearly.  Both devices
turn one proper/garbage layout pair into a graded family, from which
make_labeled_pairs builds training triplets (a, b, t): t < 0 means the
first layout is the prettier one, and |t| reflects how far apart the two
sit on the corruption scale.
"""

import math
from dataclasses import dataclass

import numpy as np

from .engines import normalize_layout
from .errors import DimensionMismatch, EmptyInput
from .graph import Layout
from .rng import substream

WORSEN_KINDS = ("perturb", "flip_nodes", "flip_edges", "movlsq")
T_MIN = 0.2
MLS_CONTROLS = 6


@dataclass(frozen=True)
class WorsenSpec:
    kind: str
    r: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in WORSEN_KINDS:
            raise ValueError(f"unknown worsening kind: {self.kind!r}")
        if not 0.0 <= self.r <= 1.0:
            raise ValueError("worsening amount must lie in [0, 1]")


@dataclass(frozen=True)
class LabeledPair:
    """Training triplet: negative t means layout `a` is prettier."""

    a: Layout
    b: Layout
    t: float
    source: str = ""


def swap_count(kind, r, n, m):
    """Number of swaps a flip operator applies."""
    if kind == "flip_nodes":
        return math.ceil(r * n / 2.0)
    if kind == "flip_edges":
        return math.ceil(r * m)
    raise ValueError(f"not a flip kind: {kind!r}")


def _rms_radius(pos):
    centered = pos - pos.mean(axis=0)
    return float(np.sqrt((centered**2).sum(axis=1).mean()))


def _mls_affine(pos, controls, displaced):
    # affine moving least squares with weights 1/d^2; the small floor on
    # d^2 keeps the normal matrix well conditioned near control points
    radius = float(np.abs(controls).max()) or 1.0
    d2 = ((pos[:, None, :] - controls[None, :, :]) ** 2).sum(axis=-1)
    w = 1.0 / (d2 + (1e-3 * radius) ** 2)
    sw = w.sum(axis=1, keepdims=True)
    pstar = (w @ controls) / sw
    qstar = (w @ displaced) / sw
    phat = controls[None, :, :] - pstar[:, None, :]
    qhat = displaced[None, :, :] - qstar[:, None, :]
    a = np.einsum("ni,nia,nib->nab", w, phat, phat)
    b = np.einsum("ni,nia,nib->nab", w, phat, qhat)
    m = np.linalg.solve(a, b)
    return qstar + np.einsum("na,nab->nb", pos - pstar, m)


def worsen(graph, layout, spec):
    """Degrade a (normalized) layout by spec.r using spec.kind."""
    pos = layout.positions
    if spec.r == 0.0 and spec.kind != "movlsq":
        return layout
    rng = substream(spec.seed, "worsen", spec.kind)
    tag = f"{layout.provenance}+{spec.kind}:{spec.r:g}"
    if spec.kind == "perturb":
        noise = rng.normal(0.0, spec.r * _rms_radius(pos), size=pos.shape)
        return layout.with_positions(pos + noise, provenance=tag)
    if spec.kind == "flip_nodes":
        out = pos.copy()
        for _ in range(swap_count(spec.kind, spec.r, graph.n, graph.m)):
            u = int(rng.integers(graph.n))
            v = int(rng.integers(graph.n - 1))
            v += v >= u
            out[[u, v]] = out[[v, u]]
        return layout.with_positions(out, provenance=tag)
    if spec.kind == "flip_edges":
        out = pos.copy()
        for _ in range(swap_count(spec.kind, spec.r, graph.n, graph.m)):
            u, v = graph.edges[int(rng.integers(graph.m))]
            out[[u, v]] = out[[v, u]]
        return layout.with_positions(out, provenance=tag)
    centroid = pos.mean(axis=0)
    radius = float(np.hypot(*(pos - centroid).T).max()) or 1.0
    theta = rng.uniform(0.0, 2.0 * np.pi) + np.arange(MLS_CONTROLS) * (
        2.0 * np.pi / MLS_CONTROLS
    )
    controls = centroid + radius * np.column_stack([np.cos(theta), np.sin(theta)])
    angles = rng.uniform(0.0, 2.0 * np.pi, size=MLS_CONTROLS)
    step = spec.r * _rms_radius(pos) * 0.5
    displaced = controls + step * np.column_stack([np.cos(angles), np.sin(angles)])
    return layout.with_positions(_mls_affine(pos, controls, displaced), provenance=tag)


def interpolate(graph, lay_a, lay_b, r):
    """Blend vertexwise, (1-r)*a + r*b, then re-normalize."""
    if lay_a.positions.shape != lay_b.positions.shape:
        raise DimensionMismatch("layouts must cover the same vertex set")
    if not 0.0 <= r <= 1.0:
        raise ValueError("interpolation parameter must lie in [0, 1]")
    mixed = (1.0 - r) * lay_a.positions + r * lay_b.positions
    tag = f"interp({lay_a.provenance},{lay_b.provenance}):{r:g}"
    return normalize_layout(
        Layout(lay_a.graph_id, mixed, provenance=tag), graph
    )


@dataclass(frozen=True)
class AugmentConfig:
    ladder_r: tuple = (0.0, 0.15, 0.5, 1.0)
    interp_r: tuple = (0.0, 0.25, 0.75, 1.0)
    worsen_kinds: tuple = WORSEN_KINDS
    t_min: float = T_MIN


def _emit(pairs, a, b, t, source):
    pairs.append(LabeledPair(a, b, t, source))
    pairs.append(LabeledPair(b, a, -t, source))


def make_labeled_pairs(graph, proper, garbage, config=AugmentConfig(), seed=0):
    """Labeled training pairs from proper and garbage layouts of one graph.

    Emits proper-vs-garbage pairs (t = -1), worsening-ladder pairs, and
    proper-to-garbage interpolation pairs (t = difference in corruption
    amount), each followed by its swapped twin with negated t.  Pairs with
    |t| below config.t_min are dropped.
    """
    if not proper or not garbage:
        raise EmptyInput("need at least one proper and one garbage layout")
    pairs = []
    for p in proper:
        for g in garbage:
            _emit(pairs, p, g, -1.0, "pg")
    for pi, p in enumerate(proper):
        for kind in config.worsen_kinds:
            rungs = []
            for ri, r in enumerate(config.ladder_r):
                child = substream(seed, "ladder", pi, kind, ri)
                spec = WorsenSpec(kind, r, seed=int(child.integers(2**63)))
                rungs.append((r, worsen(graph, p, spec)))
            for i, (ra, la) in enumerate(rungs):
                for rb, lb in rungs[i + 1 :]:
                    if abs(ra - rb) >= config.t_min:
                        _emit(pairs, la, lb, ra - rb, f"ladder:{kind}")
    for pi, p in enumerate(proper):
        for gi, g in enumerate(garbage):
            blend = [(r, interpolate(graph, p, g, r)) for r in config.interp_r]
            for i, (ra, la) in enumerate(blend):
                for rb, lb in blend[i + 1 :]:
                    if abs(ra - rb) >= config.t_min:
                        _emit(pairs, la, lb, ra - rb, "interp")
    return pairs
