"""Layout engine tests: spring embedder, stress majorization, random and
phantom layouts, and the shared normalization step."""

import itertools

import numpy as np
import pytest

from layoutjudge.engines import (
    LayoutParams,
    _random_spanning_tree,
    layout_force_directed,
    layout_phantom,
    layout_random,
    layout_stress_min,
    normalize_layout,
    stress_majorization,
)
from layoutjudge.errors import DegenerateLayout, DisconnectedGraph
from layoutjudge.graph import Graph, Layout, edge_lengths
from layoutjudge.rng import substream


def grid_graph(rows, cols):
    edges = []
    for i, j in itertools.product(range(rows), range(cols)):
        v = i * cols + j
        if j < cols - 1:
            edges.append((v, v + 1))
        if i < rows - 1:
            edges.append((v, v + cols))
    return Graph(rows * cols, edges)


from oracles import closed_form_sis as scale_free_stress


PATH3 = Graph(3, [(0, 1), (1, 2)])
PATH4 = Graph(4, [(0, 1), (1, 2), (2, 3)])
K3 = Graph(3, [(0, 1), (0, 2), (1, 2)])
C4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
TWO_PARTS = Graph(4, [(0, 1), (2, 3)])


class TestNormalize:
    def test_centroid_and_mean_edge_length(self):
        rng = substream(7, "t")
        lay = Layout("g", rng.normal(size=(9, 2)) * 3 + 5)
        g = grid_graph(3, 3)
        out = normalize_layout(lay, g)
        assert np.abs(out.positions.mean(axis=0)).max() < 1e-12
        assert abs(edge_lengths(g, out).mean() - 1.0) < 1e-12

    def test_idempotent(self):
        g = grid_graph(3, 3)
        lay = layout_random(g, 3)
        again = normalize_layout(lay, g)
        assert np.allclose(lay.positions, again.positions, atol=1e-12)

    def test_preserves_identity_fields(self):
        g = PATH3
        lay = Layout("gid", np.arange(6.0).reshape(3, 2), provenance="native")
        out = normalize_layout(lay, g)
        assert out.graph_id == "gid"
        assert out.provenance == "native"

    def test_rejects_edgeless(self):
        g = Graph(3, [])
        lay = Layout("g", np.arange(6.0).reshape(3, 2))
        with pytest.raises(DegenerateLayout):
            normalize_layout(lay, g)

    def test_rejects_coincident(self):
        lay = Layout("g", np.zeros((3, 2)))
        with pytest.raises(DegenerateLayout):
            normalize_layout(lay, PATH3)


class TestRandomLayout:
    @pytest.mark.parametrize("dist", ["uniform", "normal"])
    def test_normalized_output(self, dist):
        g = grid_graph(4, 4)
        lay = layout_random(g, 11, dist)
        assert np.abs(lay.positions.mean(axis=0)).max() < 1e-12
        assert abs(edge_lengths(g, lay).mean() - 1.0) < 1e-12
        assert lay.provenance == dist

    def test_deterministic_and_distribution_sensitive(self):
        g = grid_graph(4, 4)
        a = layout_random(g, 5, "uniform")
        b = layout_random(g, 5, "uniform")
        c = layout_random(g, 5, "normal")
        assert np.array_equal(a.positions, b.positions)
        assert not np.array_equal(a.positions, c.positions)

    def test_unknown_distribution(self):
        with pytest.raises(ValueError):
            layout_random(PATH3, 0, "cauchy")


class TestForceDirected:
    @pytest.mark.parametrize("seed", range(4))
    def test_triangle_equilateral(self, seed):
        lay = layout_force_directed(K3, LayoutParams(seed=seed, iterations=600))
        sides = edge_lengths(K3, lay)
        assert np.abs(sides / sides.mean() - 1.0).max() < 0.01

    @pytest.mark.parametrize("seed", range(4))
    def test_path3_collinear(self, seed):
        lay = layout_force_directed(PATH3, LayoutParams(seed=seed, iterations=1000))
        p = lay.positions
        a, b = p[0] - p[1], p[2] - p[1]
        cosang = float(np.dot(a, b) / (np.hypot(*a) * np.hypot(*b)))
        angle = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
        assert abs(angle - 180.0) < 5.0

    def test_deterministic(self):
        g = grid_graph(4, 5)
        a = layout_force_directed(g, LayoutParams(seed=9))
        b = layout_force_directed(g, LayoutParams(seed=9))
        c = layout_force_directed(g, LayoutParams(seed=10))
        assert np.array_equal(a.positions, b.positions)
        assert not np.array_equal(a.positions, c.positions)

    def test_output_normalized(self):
        g = grid_graph(4, 4)
        lay = layout_force_directed(g, LayoutParams(seed=2))
        assert np.abs(lay.positions.mean(axis=0)).max() < 1e-9
        assert abs(edge_lengths(g, lay).mean() - 1.0) < 1e-9
        assert lay.provenance == "fdp"


class TestStressMajorization:
    @pytest.mark.parametrize("seed", range(6))
    def test_path4_isometric(self, seed):
        pos, _ = stress_majorization(PATH4, seed)
        assert scale_free_stress(PATH4, pos) < 1e-6

    @pytest.mark.parametrize("seed", range(6))
    def test_trace_non_increasing(self, seed):
        g = grid_graph(3, 4)
        _, trace = stress_majorization(g, seed)
        diffs = np.diff(np.asarray(trace))
        assert (diffs <= 1e-9 * max(trace)).all()

    @pytest.mark.parametrize("seed", range(4))
    def test_c4_square(self, seed):
        lay = layout_stress_min(C4, LayoutParams(seed=seed))
        sides = edge_lengths(C4, lay)
        assert np.abs(sides / sides.mean() - 1.0).max() < 0.01

    def test_beats_random_start(self):
        for g in (grid_graph(4, 4), Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])):
            proper = layout_stress_min(g, LayoutParams(seed=1))
            rand = layout_random(g, 1)
            assert scale_free_stress(g, proper.positions) <= scale_free_stress(
                g, rand.positions
            )

    def test_deterministic(self):
        g = grid_graph(4, 4)
        a = layout_stress_min(g, LayoutParams(seed=4))
        b = layout_stress_min(g, LayoutParams(seed=4))
        assert np.array_equal(a.positions, b.positions)
        assert a.provenance == "stress"

    def test_disconnected_rejected(self):
        with pytest.raises(DisconnectedGraph):
            stress_majorization(TWO_PARTS, 0)


class TestSpanningTree:
    @pytest.mark.parametrize("n", [2, 3, 7, 20])
    def test_valid_tree(self, n):
        for seed in range(5):
            rng = substream(seed, "tree-test")
            edges = _random_spanning_tree(n, rng)
            assert len(edges) == n - 1
            assert Graph(n, edges).is_connected()

    def test_varies_with_rng(self):
        seen = {tuple(_random_spanning_tree(8, substream(s, "tt"))) for s in range(10)}
        assert len(seen) > 1


class TestPhantom:
    def test_shape_and_provenance(self):
        g = grid_graph(4, 4)
        lay = layout_phantom(g, 3)
        assert lay.positions.shape == (g.n, 2)
        assert lay.provenance == "phantom"
        assert np.abs(lay.positions.mean(axis=0)).max() < 1e-9

    def test_deterministic(self):
        g = grid_graph(3, 5)
        a = layout_phantom(g, 8)
        b = layout_phantom(g, 8)
        c = layout_phantom(g, 9)
        assert np.array_equal(a.positions, b.positions)
        assert not np.array_equal(a.positions, c.positions)

    def test_worse_than_proper(self):
        g = grid_graph(5, 5)
        proper = layout_stress_min(g, LayoutParams(seed=0))
        ghost = layout_phantom(g, 0)
        assert scale_free_stress(g, ghost.positions) > scale_free_stress(
            g, proper.positions
        )

    def test_disconnected_rejected(self):
        with pytest.raises(DisconnectedGraph):
            layout_phantom(TWO_PARTS, 0)

    def test_dense_graph_edge_fill(self):
        # near-complete graph forces the complement-enumeration fallback
        n = 8
        edges = [e for e in itertools.combinations(range(n), 2)]
        g = Graph(n, edges[:-1])
        lay = layout_phantom(g, 1)
        assert lay.positions.shape == (n, 2)
