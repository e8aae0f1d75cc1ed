"""Corruption and pair-labeling tests."""

import itertools

import numpy as np
import pytest
from oracles import closed_form_sis

from layoutjudge.augment import (
    AugmentConfig,
    LabeledPair,
    WORSEN_KINDS,
    WorsenSpec,
    interpolate,
    make_labeled_pairs,
    swap_count,
    worsen,
)
from layoutjudge.engines import layout_random, normalize_layout
from layoutjudge.errors import DimensionMismatch, EmptyInput
from layoutjudge.graph import Graph, Layout


def grid_graph_layout(rows, cols):
    edges, pts = [], []
    for i, j in itertools.product(range(rows), range(cols)):
        v = i * cols + j
        pts.append((float(j), float(i)))
        if j < cols - 1:
            edges.append((v, v + 1))
        if i < rows - 1:
            edges.append((v, v + cols))
    g = Graph(rows * cols, edges)
    lay = normalize_layout(Layout("g", np.array(pts)), g)
    return g, lay


GRID6 = grid_graph_layout(6, 6)


class TestWorsenSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            WorsenSpec("melt", 0.5)
        with pytest.raises(ValueError):
            WorsenSpec("perturb", 1.5)

    def test_swap_counts(self):
        assert swap_count("flip_nodes", 1.0, 10, 99) == 5
        assert swap_count("flip_nodes", 0.3, 10, 99) == 2
        assert swap_count("flip_edges", 1.0, 99, 60) == 60
        assert swap_count("flip_edges", 0.1, 99, 60) == 6
        assert swap_count("flip_nodes", 0.0, 10, 99) == 0


class TestWorsen:
    @pytest.mark.parametrize("kind", ["perturb", "flip_nodes", "flip_edges"])
    def test_r_zero_identity(self, kind):
        g, lay = GRID6
        out = worsen(g, lay, WorsenSpec(kind, 0.0, seed=3))
        assert np.array_equal(out.positions, lay.positions)

    def test_movlsq_r_zero_near_identity(self):
        g, lay = GRID6
        out = worsen(g, lay, WorsenSpec("movlsq", 0.0, seed=3))
        assert np.abs(out.positions - lay.positions).max() < 1e-12

    @pytest.mark.parametrize("kind", WORSEN_KINDS)
    def test_deterministic(self, kind):
        g, lay = GRID6
        a = worsen(g, lay, WorsenSpec(kind, 0.6, seed=9))
        b = worsen(g, lay, WorsenSpec(kind, 0.6, seed=9))
        c = worsen(g, lay, WorsenSpec(kind, 0.6, seed=10))
        assert np.array_equal(a.positions, b.positions)
        assert not np.array_equal(a.positions, c.positions)

    @pytest.mark.parametrize("kind", ["flip_nodes", "flip_edges"])
    def test_flips_preserve_coordinates(self, kind):
        g, lay = GRID6
        for r in (0.15, 0.5, 1.0):
            out = worsen(g, lay, WorsenSpec(kind, r, seed=4))
            assert np.array_equal(
                np.sort(out.positions, axis=0), np.sort(lay.positions, axis=0)
            )

    def test_perturb_noise_scale(self):
        g, lay = GRID6
        r = 0.4
        rms = float(np.sqrt((lay.positions**2).sum(axis=1).mean()))
        disp = []
        for seed in range(40):
            out = worsen(g, lay, WorsenSpec("perturb", r, seed=seed))
            disp.append(out.positions - lay.positions)
        sigma = np.concatenate(disp).std()
        assert abs(sigma - r * rms) / (r * rms) < 0.05

    @pytest.mark.parametrize("kind", WORSEN_KINDS)
    def test_monotone_degradation(self, kind):
        # statistical contract over 30 seeded grid instances
        g, lay = GRID6
        means = {}
        for r in (0.0, 0.15, 0.5, 1.0):
            vals = [
                closed_form_sis(g, worsen(g, lay, WorsenSpec(kind, r, seed=s)).positions)
                for s in range(30)
            ]
            means[r] = float(np.mean(vals))
        assert means[1.0] > means[0.0]
        if kind == "perturb":
            assert means[0.5] > means[0.15]

    def test_provenance_tag(self):
        g, lay = GRID6
        out = worsen(g, lay, WorsenSpec("perturb", 0.5, seed=1))
        assert "perturb" in out.provenance


class TestInterpolate:
    def test_endpoints(self):
        g, lay = GRID6
        rand = layout_random(g, 7)
        a = interpolate(g, lay, rand, 0.0)
        b = interpolate(g, lay, rand, 1.0)
        assert np.allclose(a.positions, lay.positions, atol=1e-12)
        assert np.allclose(b.positions, rand.positions, atol=1e-12)

    def test_self_fixed_point(self):
        g, lay = GRID6
        out = interpolate(g, lay, lay, 0.5)
        assert np.allclose(out.positions, lay.positions, atol=1e-12)

    def test_output_normalized(self):
        g, lay = GRID6
        out = interpolate(g, lay, layout_random(g, 2), 0.3)
        assert np.abs(out.positions.mean(axis=0)).max() < 1e-12

    def test_shape_mismatch(self):
        g, lay = GRID6
        small = Layout("g", np.zeros((4, 2)))
        with pytest.raises(DimensionMismatch):
            interpolate(g, lay, small, 0.5)

    def test_bad_r(self):
        g, lay = GRID6
        with pytest.raises(ValueError):
            interpolate(g, lay, lay, 1.2)


class TestMakeLabeledPairs:
    def make(self, n_proper=3, n_garbage=2, **kw):
        g, lay = GRID6
        proper = [lay] * n_proper
        garbage = [layout_random(g, s) for s in range(n_garbage)]
        return make_labeled_pairs(g, proper, garbage, **kw)

    def test_counts_match_enumeration(self):
        # independent count: pg pairs + ladder pairs + interpolation pairs,
        # each doubled by swapping, thresholded at |t| >= 0.2
        cfg = AugmentConfig()
        thr = lambda rs: sum(
            1
            for i in range(len(rs))
            for j in range(i + 1, len(rs))
            if abs(rs[i] - rs[j]) >= cfg.t_min
        )
        expect = 2 * (
            3 * 2
            + 3 * len(cfg.worsen_kinds) * thr(cfg.ladder_r)
            + 3 * 2 * thr(cfg.interp_r)
        )
        pairs = self.make()
        assert len(pairs) == expect == 204

    def test_pg_sign_convention(self):
        pairs = self.make(n_proper=1, n_garbage=1, config=AugmentConfig(
            ladder_r=(), interp_r=()))
        assert len(pairs) == 2
        first, second = pairs
        assert first.t == -1.0 and second.t == 1.0
        assert first.a is second.b and first.b is second.a

    def test_threshold_drops_near_ties(self):
        cfg = AugmentConfig(ladder_r=(0.3, 0.4), interp_r=(), worsen_kinds=("perturb",))
        pairs = self.make(n_proper=1, n_garbage=1, config=cfg)
        # only the pg pair and its twin survive
        assert len(pairs) == 2
        assert {p.source for p in pairs} == {"pg"}

    def test_twins_negate(self):
        pairs = self.make()
        for a, b in zip(pairs[0::2], pairs[1::2]):
            assert a.t == -b.t
            assert a.a is b.b and a.b is b.a

    def test_t_bounds(self):
        pairs = self.make()
        assert all(-1.0 <= p.t <= 1.0 for p in pairs)
        assert all(abs(p.t) >= 0.2 for p in pairs)

    def test_ladder_label_values(self):
        cfg = AugmentConfig(ladder_r=(0.0, 0.5), interp_r=(), worsen_kinds=("perturb",))
        pairs = self.make(n_proper=1, n_garbage=1, config=cfg)
        ladder = [p for p in pairs if p.source == "ladder:perturb"]
        assert sorted(p.t for p in ladder) == [-0.5, 0.5]

    def test_deterministic(self):
        a = self.make(seed=3)
        b = self.make(seed=3)
        assert len(a) == len(b)
        for pa, pb in zip(a, b):
            assert pa.t == pb.t
            assert np.array_equal(pa.a.positions, pb.a.positions)
            assert np.array_equal(pa.b.positions, pb.b.positions)

    def test_empty_rejected(self):
        g, lay = GRID6
        with pytest.raises(EmptyInput):
            make_labeled_pairs(g, [], [lay])
        with pytest.raises(EmptyInput):
            make_labeled_pairs(g, [lay], [])
