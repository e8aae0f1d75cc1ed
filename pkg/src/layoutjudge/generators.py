"""Seeded graph generators.

Every generator returns (Graph, Layout or None): generators whose
construction implies a drawing also emit that native layout; torus
generators have no meaningful 2-D native drawing and return None.

All randomness is drawn from Philox substreams (see rng.py), so a
(spec, seed) pair reproduces the same graph and layout byte for byte
on any platform.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeTooSmall
from .graph import Graph, Layout
from .rng import substream

GENERATOR_KINDS = (
    "grid",
    "torus1",
    "torus2",
    "lindenmayer",
    "quasi3d",
    "quasi4d",
    "quasi5d",
    "quasi6d",
    "mosaic1",
    "mosaic2",
    "bottle",
)


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate: a kind, its size parameters, and a seed."""

    kind: str
    seed: int = 0
    target_n: int | None = None
    rows: int | None = None
    cols: int | None = None

    def label(self):
        size = f"{self.rows}x{self.cols}" if self.rows else f"n{self.target_n}"
        return f"{self.kind}-{size}-s{self.seed}"


def generate(spec):
    """Run the generator described by spec. Returns (graph, native_layout|None)."""
    kind = spec.kind
    if kind == "grid":
        return gen_grid(spec.rows, spec.cols)
    if kind in ("torus1", "torus2"):
        return gen_torus(spec.rows, spec.cols, order=int(kind[-1])), None
    if kind == "lindenmayer":
        return gen_lindenmayer(spec.target_n, spec.seed)
    if kind.startswith("quasi"):
        dim = int(kind[5])
        extent = max(2, round(spec.target_n ** (1.0 / dim)))
        return gen_quasi(dim, extent, spec.seed)
    if kind in ("mosaic1", "mosaic2"):
        return gen_mosaic(int(kind[-1]), spec.target_n, spec.seed)
    if kind == "bottle":
        return gen_bottle(spec.target_n, spec.seed)
    raise ValueError(f"unknown generator kind: {kind!r}")


# ---------------------------------------------------------------- grid/torus


def _grid_edges(rows, cols):
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return edges


def gen_grid(rows, cols):
    """Rectangular lattice with its unit-spaced native drawing."""
    rows, cols = int(rows), int(cols)
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise SizeTooSmall("grid needs at least two vertices")
    g = Graph(rows * cols, _grid_edges(rows, cols))
    pos = np.array([[float(j), float(i)] for i in range(rows) for j in range(cols)])
    return g, Layout("grid", pos, provenance="native")


def gen_torus(rows, cols, order):
    """Grid closed into a torus: order 1 wraps rows, order 2 wraps both."""
    rows, cols = int(rows), int(cols)
    if order not in (1, 2):
        raise ValueError("torus order must be 1 or 2")
    if rows < 3 or cols < 3:
        raise SizeTooSmall("torus needs rows and cols >= 3 (wrap would duplicate edges)")
    edges = _grid_edges(rows, cols)
    for j in range(cols):  # connect last row back to first
        edges.append(((rows - 1) * cols + j, j))
    if order == 2:
        for i in range(rows):  # connect last column back to first
            edges.append((i * cols + cols - 1, i * cols))
    return Graph(rows * cols, edges)


# -------------------------------------------------------------- lindenmayer


class _GrowState:
    """Mutable graph-with-positions used while a generator grows a graph."""

    def __init__(self):
        self.pos = {}
        self.adj = {}
        self.next_id = 0

    def add_vertex(self, xy):
        v = self.next_id
        self.next_id += 1
        self.pos[v] = np.asarray(xy, dtype=np.float64)
        self.adj[v] = set()
        return v

    def add_edge(self, u, v):
        self.adj[u].add(v)
        self.adj[v].add(u)

    def remove_vertex(self, v):
        for u in self.adj[v]:
            self.adj[u].discard(v)
        del self.adj[v]
        del self.pos[v]

    @property
    def n(self):
        return len(self.pos)

    def finish(self, graph_id, provenance="native"):
        ids = sorted(self.pos)
        index = {v: i for i, v in enumerate(ids)}
        edges = set()
        for u, nbrs in self.adj.items():
            for v in nbrs:
                edges.add((min(index[u], index[v]), max(index[u], index[v])))
        pos = np.array([self.pos[v] for v in ids])
        return Graph(len(ids), sorted(edges)), Layout(graph_id, pos, provenance)


_L_RULES = ("singleton", "star", "wheel", "ring", "clique")


def _free_radius(state, center, exclude):
    """Placement radius at `center`: a fraction of the gap to other vertices."""
    others = [p for v, p in state.pos.items() if v != exclude]
    if not others:
        return 1.0
    d = np.hypot(*(np.asarray(others) - center).T)
    return max(0.35 * float(d.min()), 1e-6)


def _circle(center, radius, count, phase):
    angles = phase + 2.0 * math.pi * np.arange(count) / count
    return center + radius * np.column_stack([np.cos(angles), np.sin(angles)])


def _replace_vertex(state, v, rng):
    """Replace vertex v with a random substructure, stitching old neighbors on."""
    nbrs = sorted(state.adj[v])
    center = state.pos[v].copy()
    radius = _free_radius(state, center, exclude=v)
    state.remove_vertex(v)

    if not nbrs:
        # an isolated vertex (the seed vertex) becomes a small grid patch
        rows = int(rng.integers(2, 4))
        cols = int(rng.integers(2, 4))
        span = radius / max(rows, cols)
        ids = []
        for i in range(rows):
            for j in range(cols):
                xy = center + span * np.array([j - (cols - 1) / 2, i - (rows - 1) / 2])
                ids.append(state.add_vertex(xy))
        for u, w in _grid_edges(rows, cols):
            state.add_edge(ids[u], ids[w])
        return

    rule = _L_RULES[int(rng.integers(len(_L_RULES)))]
    arity = int(rng.integers(3, 9))
    phase = float(rng.uniform(0.0, 2.0 * math.pi))

    if rule == "singleton":
        w = state.add_vertex(center)
        for u in nbrs:
            state.add_edge(w, u)
        return

    ring_pos = _circle(center, radius, arity, phase)
    members = [state.add_vertex(xy) for xy in ring_pos]
    if rule in ("star", "wheel"):
        hub = state.add_vertex(center)
        for w in members:
            state.add_edge(hub, w)
    if rule in ("wheel", "ring"):
        for i in range(arity):
            state.add_edge(members[i], members[(i + 1) % arity])
    if rule == "clique":
        for i in range(arity):
            for j in range(i + 1, arity):
                state.add_edge(members[i], members[j])
    # old neighbors attach round-robin to the new members
    for j, u in enumerate(nbrs):
        state.add_edge(u, members[j % arity])


def gen_lindenmayer(target_n, seed):
    """Grow a graph by repeated stochastic vertex replacement.

    Starting from a single vertex, a random vertex is replaced by a random
    substructure (singleton, star, wheel, ring, clique; a grid patch for the
    isolated seed vertex) until the vertex count reaches target_n.  The
    native layout keeps each replacement inside a disc around the replaced
    vertex, so the drawing stays locally readable.
    """
    target_n = int(target_n)
    if target_n < 2:
        raise SizeTooSmall("lindenmayer needs target_n >= 2")
    rng = substream(seed, "lindenmayer")
    state = _GrowState()
    state.add_vertex((0.0, 0.0))
    while state.n < target_n:
        ids = sorted(state.pos)
        v = ids[int(rng.integers(len(ids)))]
        _replace_vertex(state, v, rng)
    return state.finish("lindenmayer")


# -------------------------------------------------------------------- quasi


def gen_quasi(dim, extent, seed):
    """Cubic lattice in `dim` dimensions projected onto a random 2-plane."""
    dim, extent = int(dim), int(extent)
    if not 3 <= dim <= 6:
        raise ValueError("quasi supports dimensions 3..6")
    if extent < 2:
        raise SizeTooSmall("quasi needs extent >= 2")
    coords = np.indices((extent,) * dim).reshape(dim, -1).T  # C order, id-aligned
    n = coords.shape[0]
    strides = extent ** np.arange(dim - 1, -1, -1)
    ids = coords @ strides
    assert np.array_equal(ids, np.arange(n))
    edges = []
    for axis in range(dim):
        mask = coords[:, axis] + 1 < extent
        src = np.nonzero(mask)[0]
        edges.extend(zip(src.tolist(), (src + strides[axis]).tolist()))
    g = Graph(n, edges)

    rng = substream(seed, "quasi", dim)
    for _ in range(16):
        basis, _ = np.linalg.qr(rng.normal(size=(dim, 2)))
        pos = coords @ basis
        if np.unique(pos, axis=0).shape[0] == n:
            return g, Layout(f"quasi{dim}d", pos, provenance="native")
    raise RuntimeError("could not find an injective projection plane")


# ------------------------------------------------------------------- mosaic


class _Mosaic:
    """Planar face-subdivision state: positions, edge set, face cycles.

    Faces are keyed by insertion-ordered integer ids; a vertex-to-faces
    index keeps edge subdivision O(faces touching the edge).
    """

    def __init__(self, arity):
        self._buf = np.empty((256, 2))
        self.n = 0
        self.edges = set()
        self.faces = {}
        self._vfaces = {}
        self._next_face = 0
        angles = 2.0 * math.pi * np.arange(arity) / arity
        ring = [self._add((math.cos(a), math.sin(a))) for a in angles]
        for i in range(arity):
            self._link(ring[i], ring[(i + 1) % arity])
        self._register(list(ring))

    def pos(self, v):
        return self._buf[v]

    def _add(self, xy, away=None):
        # Subdivision of faces with straight corners (midpoints inserted by a
        # neighboring face) can compute a point that coincides exactly with an
        # existing vertex.  Nudge such points by a deterministic offset so the
        # native drawing never stacks two vertices.
        xy = np.asarray(xy, dtype=np.float64)
        if self.n:
            existing = self._buf[: self.n]
            step = away if away is not None else np.array([1.0, 0.0])
            size = float(np.hypot(step[0], step[1]))
            if size > 0:
                step = step / size  # nudge ~5% of the local feature size
            else:
                step, size = np.array([1.0, 0.0]), 1e-6
            k = 0
            while np.abs(existing - xy).max(axis=1).min() < 1e-12:
                k += 1
                xy = xy + step * (0.05 * size * k)
        if self.n == self._buf.shape[0]:
            self._buf = np.vstack([self._buf, np.empty_like(self._buf)])
        v = self.n
        self._buf[v] = xy
        self.n += 1
        self._vfaces[v] = set()
        return v

    def _link(self, u, v):
        self.edges.add((min(u, v), max(u, v)))

    def _register(self, cycle):
        fid = self._next_face
        self._next_face += 1
        self.faces[fid] = cycle
        for v in cycle:
            self._vfaces[v].add(fid)
        return fid

    def _unregister(self, fid):
        for v in self.faces.pop(fid):
            self._vfaces[v].discard(fid)

    def _centroid(self, cycle):
        return self._buf[list(cycle)].mean(axis=0)

    def _perp(self, a, b):
        d = self.pos(b) - self.pos(a)
        return np.array([-d[1], d[0]])

    def _subdivide(self, a, b):
        """Split edge (a, b) at its midpoint; patch every face containing it."""
        self.edges.remove((min(a, b), max(a, b)))
        w = self._add((self.pos(a) + self.pos(b)) / 2.0, away=self._perp(a, b))
        self._link(a, w)
        self._link(w, b)
        for fid in sorted(self._vfaces[a] & self._vfaces[b]):
            cycle = self.faces[fid]
            k = len(cycle)
            for i in range(k):
                u, v = cycle[i], cycle[(i + 1) % k]
                if (u, v) == (a, b) or (u, v) == (b, a):
                    cycle.insert(i + 1, w)
                    self._vfaces[w].add(fid)
                    break
        return w

    def apply(self, rule, fid):
        u = list(self.faces[fid])
        k = len(u)
        if rule == "star":
            c = self._add(self._centroid(u), away=self._perp(u[0], u[1]))
            for v in u:
                self._link(c, v)
            self._unregister(fid)
            for i in range(k):
                self._register([u[i], u[(i + 1) % k], c])
        elif rule == "flower":
            w = [self._subdivide(u[i], u[(i + 1) % k]) for i in range(k)]
            c = self._add(self._centroid(u), away=self._perp(u[0], u[1]))
            for wi in w:
                self._link(c, wi)
            self._unregister(fid)
            for i in range(k):
                self._register([w[i], u[(i + 1) % k], w[(i + 1) % k], c])
        elif rule == "shape":
            w = [self._subdivide(u[i], u[(i + 1) % k]) for i in range(k)]
            for i in range(k):
                self._link(w[i], w[(i + 1) % k])
            self._unregister(fid)
            self._register(list(w))
            for i in range(k):
                self._register([w[i], u[(i + 1) % k], w[(i + 1) % k]])
        else:
            raise ValueError(f"unknown mosaic rule: {rule!r}")

    def finish(self, graph_id):
        edges = sorted(self.edges)
        pos = self._buf[: self.n].copy()
        return Graph(self.n, edges), Layout(graph_id, pos, provenance="native")


_MOSAIC_RULES = ("star", "flower", "shape")


def gen_mosaic(variant, target_n, seed):
    """Grow a planar graph by subdividing faces of a seed polygon.

    Variant 1 applies a random rule to one random face per step; variant 2
    picks one rule per round and applies it to every face alive at the start
    of the round, which yields more symmetric results.
    """
    if variant not in (1, 2):
        raise ValueError("mosaic variant must be 1 or 2")
    target_n = int(target_n)
    if target_n < 3:
        raise SizeTooSmall("mosaic needs target_n >= 3")
    rng = substream(seed, "mosaic", variant)
    state = _Mosaic(arity=int(rng.integers(3, 9)))
    while state.n < target_n:
        if variant == 1:
            fids = list(state.faces.keys())
            fid = fids[int(rng.integers(len(fids)))]
            rule = _MOSAIC_RULES[int(rng.integers(3))]
            state.apply(rule, fid)
        else:
            # one rule per round, applied to every face alive at round start;
            # the round stops early once the target is reached so the vertex
            # count overshoots by at most one face application
            rule = _MOSAIC_RULES[int(rng.integers(3))]
            for fid in list(state.faces.keys()):
                if state.n >= target_n:
                    break
                state.apply(rule, fid)
    return state.finish(f"mosaic{variant}")


# ------------------------------------------------------------------- bottle


def gen_bottle(target_n, seed, rings=None, segments=None):
    """Mesh of a solid of revolution with a random radius profile.

    rings * segments vertices on stacked circles; ring edges plus meridians.
    The native layout is an axonometric projection from a seeded view angle.
    rings/segments override the sizes derived from target_n (mainly for tests).
    """
    target_n = int(target_n)
    if target_n < 8 and rings is None:
        raise SizeTooSmall("bottle needs target_n >= 8")
    rng = substream(seed, "bottle")
    s = int(rng.integers(4, 13)) if segments is None else int(segments)
    r = max(2, round(target_n / s)) if rings is None else int(rings)
    if s < 3 or r < 2:
        raise SizeTooSmall("bottle needs segments >= 3 and rings >= 2")

    n_ctrl = int(rng.integers(4, 9))
    ctrl = rng.uniform(0.5, 2.0, size=n_ctrl)
    t = np.arange(r) / max(r - 1, 1)
    radii = np.interp(t, np.linspace(0.0, 1.0, n_ctrl), ctrl)
    dz = 2.0 * math.pi * float(radii.mean()) / s  # roughly square quads

    theta = 2.0 * math.pi * np.arange(s) / s
    pts = np.empty((r * s, 3))
    for i in range(r):
        sl = slice(i * s, (i + 1) * s)
        pts[sl, 0] = radii[i] * np.cos(theta)
        pts[sl, 1] = radii[i] * np.sin(theta)
        pts[sl, 2] = i * dz

    edges = []
    for i in range(r):
        for j in range(s):
            edges.append((i * s + j, i * s + (j + 1) % s))
            if i + 1 < r:
                edges.append((i * s + j, (i + 1) * s + j))
    g = Graph(r * s, edges)

    for _ in range(16):
        spin = float(rng.uniform(0.0, 2.0 * math.pi))
        tilt = float(rng.uniform(0.5, 1.2))
        cz, sz = math.cos(spin), math.sin(spin)
        cx, sx = math.cos(tilt), math.sin(tilt)
        rot_z = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
        rot_x = np.array([[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]])
        flat = (pts @ rot_z.T @ rot_x.T)[:, :2]
        if np.unique(flat, axis=0).shape[0] == g.n:
            return g, Layout("bottle", flat, provenance="native")
    raise RuntimeError("could not find an injective projection angle")
