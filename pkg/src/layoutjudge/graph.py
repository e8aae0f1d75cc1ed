"""Core graph and layout types plus text file I/O.

Graphs are simple, undirected, unweighted, with dense 0-based vertex ids.
Layouts assign 2-D double coordinates to every vertex of one graph.  Both are
immutable after construction and safe to share across parallel workers.
"""

from collections import deque
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import (
    DisconnectedGraph,
    InvariantViolation,
    ParseError,
)

UNREACHED = np.uint16(0xFFFF)


class Graph:
    """Immutable simple undirected graph.

    Parameters
    ----------
    n : int
        Number of vertices; ids are 0..n-1.
    edges : iterable of (u, v)
        Undirected edges.  Stored with u < v, sorted lexicographically.
    """

    __slots__ = ("n", "edges", "_indptr", "_nbrs", "_dist")

    def __init__(self, n, edges):
        n = int(n)
        if n < 1:
            raise InvariantViolation("graph needs at least one vertex")
        arr = np.asarray([[int(u), int(v)] for u, v in edges], dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise InvariantViolation("edge endpoint out of range")
        if arr.size and (arr[:, 0] == arr[:, 1]).any():
            raise InvariantViolation("self-loop")
        if arr.size:
            arr = np.column_stack([arr.min(axis=1), arr.max(axis=1)])
            arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
        if arr.shape[0] > 1 and (np.diff(arr, axis=0) == 0).all(axis=1).any():
            raise InvariantViolation("duplicate edge")
        self.n = n
        self.edges = arr
        self.edges.flags.writeable = False
        # CSR adjacency with sorted neighbor segments
        deg = np.zeros(n, dtype=np.int64)
        if arr.size:
            np.add.at(deg, arr[:, 0], 1)
            np.add.at(deg, arr[:, 1], 1)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        nbrs = np.zeros(indptr[-1], dtype=np.int64)
        cursor = indptr[:-1].copy()
        for u, v in arr:
            nbrs[cursor[u]] = v
            cursor[u] += 1
            nbrs[cursor[v]] = u
            cursor[v] += 1
        for v in range(n):
            seg = nbrs[indptr[v]:indptr[v + 1]]
            seg.sort()
        self._indptr = indptr
        self._nbrs = nbrs
        self._indptr.flags.writeable = False
        self._nbrs.flags.writeable = False
        self._dist = None

    @property
    def m(self):
        return self.edges.shape[0]

    def neighbors(self, v):
        """Sorted neighbor ids of vertex v."""
        return self._nbrs[self._indptr[v]:self._indptr[v + 1]]

    def degree(self, v=None):
        if v is None:
            return np.diff(self._indptr)
        return int(self._indptr[v + 1] - self._indptr[v])

    def distance_matrix(self):
        """All-pairs hop distances via per-source BFS, cached.

        Returns an (n, n) uint16 array.  Raises DisconnectedGraph when some
        pair is unreachable.  Sizes are capped upstream so uint16 suffices.
        """
        if self._dist is None:
            n = self.n
            data = np.ones(len(self._nbrs), dtype=np.int8)
            adj = csr_matrix((data, self._nbrs, self._indptr), shape=(n, n))
            raw = shortest_path(adj, method="D", unweighted=True, directed=False)
            if np.isinf(raw).any():
                raise DisconnectedGraph("graph is not connected")
            dist = raw.astype(np.uint16)
            dist.flags.writeable = False
            self._dist = dist
        return self._dist

    def diameter(self):
        return int(self.distance_matrix().max())

    def is_connected(self):
        if self._dist is not None:
            return True
        seen = np.zeros(self.n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in self._nbrs[self._indptr[u]:self._indptr[u + 1]]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        return bool(seen.all())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def __getstate__(self):
        # drop the cached distance matrix when pickling to workers
        return {"n": self.n, "edges": np.asarray(self.edges)}

    def __setstate__(self, state):
        fresh = Graph(state["n"], state["edges"])
        for slot in self.__slots__:
            object.__setattr__(self, slot, getattr(fresh, slot))


@dataclass(frozen=True)
class Layout:
    """2-D positions for the vertices of one graph.

    positions[i] is the coordinate of vertex i.  graph_id is an opaque
    identifier used to match layouts to graphs in files and corpora, and
    provenance records how the layout was produced.
    """

    graph_id: str
    positions: np.ndarray
    provenance: str = "unknown"

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise InvariantViolation("positions must have shape (n, 2)")
        if not np.isfinite(pos).all():
            raise InvariantViolation("positions must be finite")
        pos = pos.copy()
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)

    @property
    def n(self):
        return self.positions.shape[0]

    def with_positions(self, positions, provenance=None):
        return replace(
            self,
            positions=positions,
            provenance=self.provenance if provenance is None else provenance,
        )

    def distance(self, u, v):
        """Euclidean distance between vertices u and v."""
        d = self.positions[u] - self.positions[v]
        return float(np.hypot(d[0], d[1]))

    def __eq__(self, other):
        if not isinstance(other, Layout):
            return NotImplemented
        return (
            self.graph_id == other.graph_id
            and self.provenance == other.provenance
            and np.array_equal(self.positions, other.positions)
        )


def edge_lengths(graph, layout):
    """Euclidean length of every edge, in edge order."""
    p = layout.positions
    d = p[graph.edges[:, 0]] - p[graph.edges[:, 1]]
    return np.hypot(d[:, 0], d[:, 1])


def pairwise_distances(layout):
    """Condensed distances for all unordered vertex pairs (i < j order)."""
    p = layout.positions
    iu, ju = np.triu_indices(p.shape[0], k=1)
    d = p[iu] - p[ju]
    return np.hypot(d[:, 0], d[:, 1])


def _data_lines(text):
    """Yield (line_number, stripped_line) skipping blanks and # comments."""
    for idx, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield idx, line


def _comments(text, key):
    """Return the value of a '# key: value' comment line, or None."""
    prefix = f"# {key}:"
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith(prefix):
            return line[len(prefix):].strip()
    return None


def parse_graph(text):
    """Parse the graph text format: a header line 'n m', then m lines 'u v'."""
    lines = _data_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty graph file") from None
    parts = header.split()
    if len(parts) != 2:
        raise ParseError("header must be 'n m'", line=lineno)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError("header must contain two integers", line=lineno) from None
    if n < 1 or m < 0:
        raise ParseError("header out of range", line=lineno)
    edges = []
    seen = set()
    for lineno, line in lines:
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("edge line must be 'u v'", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("edge endpoints must be integers", line=lineno) from None
        if u == v:
            raise ParseError("self-loop", line=lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError("edge endpoint out of range", line=lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError("duplicate edge", line=lineno)
        seen.add(key)
        edges.append(key)
    if len(edges) != m:
        raise ParseError(f"expected {m} edges, found {len(edges)}")
    return Graph(n, edges)


def format_graph(graph, comments=()):
    """Render a graph in the text format (u < v on every edge line)."""
    out = [f"# {c}" for c in comments]
    out.append(f"{graph.n} {graph.m}")
    out.extend(f"{u} {v}" for u, v in graph.edges)
    return "\n".join(out) + "\n"


def parse_layout(text, graph_id=None):
    """Parse the layout text format: a count line 'n', then n lines 'x y'.

    graph_id and provenance round-trip through '# graph:' / '# provenance:'
    comment lines when present; an explicit graph_id argument wins.
    """
    file_graph = _comments(text, "graph")
    file_prov = _comments(text, "provenance")
    lines = _data_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty layout file") from None
    try:
        n = int(header)
    except ValueError:
        raise ParseError("header must be the vertex count", line=lineno) from None
    if n < 1:
        raise ParseError("vertex count out of range", line=lineno)
    rows = []
    for lineno, line in lines:
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("coordinate line must be 'x y'", line=lineno)
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ParseError("coordinates must be decimals", line=lineno) from None
    if len(rows) != n:
        raise ParseError(f"expected {n} coordinate lines, found {len(rows)}")
    return Layout(
        graph_id=graph_id or file_graph or "layout",
        positions=np.asarray(rows, dtype=np.float64),
        provenance=file_prov or "file",
    )


def format_layout(layout, comments=()):
    """Render a layout losslessly (repr round-trips float64 exactly)."""
    out = [f"# {c}" for c in comments]
    out.append(f"# graph: {layout.graph_id}")
    out.append(f"# provenance: {layout.provenance}")
    out.append(str(layout.n))
    out.extend(f"{repr(float(x))} {repr(float(y))}" for x, y in layout.positions)
    return "\n".join(out) + "\n"


def read_graph(path):
    with open(path, "r", encoding="utf8") as fh:
        return parse_graph(fh.read())


def write_graph(path, graph, comments=()):
    with open(path, "w", encoding="utf8") as fh:
        fh.write(format_graph(graph, comments))


def read_layout(path, graph_id=None):
    with open(path, "r", encoding="utf8") as fh:
        return parse_layout(fh.read(), graph_id=graph_id)


def write_layout(path, layout, comments=()):
    with open(path, "w", encoding="utf8") as fh:
        fh.write(format_layout(layout, comments))
