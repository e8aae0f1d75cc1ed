"""Discriminator tests: architecture, gradients, training, persistence.

The gradient check compares hand-derived backprop against central finite
differences for every one of the 1066 parameters, with dropout disabled.
"""

import numpy as np
import pytest

from layoutjudge.discriminator import (
    MODEL_VERSION,
    PARAM_COUNT,
    _WEIGHT_SHAPES,
    _init_weights,
    ModelParams,
    TrainConfig,
    compute_standardization,
    dm_forward,
    dm_infer,
    load_model,
    loss_and_gradients,
    save_model,
    sm_forward,
    train,
    verdict_from_t,
)
from layoutjudge.errors import (
    ChecksumMismatch,
    DimensionMismatch,
    EmptyInput,
    VersionMismatch,
)
from layoutjudge.rng import substream


def make_params(seed=0, zero_weights=False):
    w = _init_weights(seed)
    if zero_weights:
        for k in _WEIGHT_SHAPES:
            setattr(w, k, np.zeros(_WEIGHT_SHAPES[k]))
    return ModelParams(
        w.w1, w.b1, w.w2, w.b2, w.wg, w.bg, w.wo, w.bo,
        np.zeros(57), np.ones(57), np.zeros(2), np.ones(2), np.zeros(59, bool),
    )


def training_arrays(n, seed=0):
    rng = substream(seed, "train-arrays")
    return (
        rng.normal(size=(n, 2)),
        rng.normal(size=(n, 57)),
        rng.normal(size=(n, 57)),
        rng.choice([-1.0, 1.0], size=n),
    )


class TestArchitecture:
    def test_param_count(self):
        assert make_params().param_count == PARAM_COUNT == 1066

    def test_bad_shape_rejected(self):
        w = _init_weights(0)
        with pytest.raises(DimensionMismatch):
            ModelParams(
                np.zeros((57, 14)), w.b1, w.w2, w.b2, w.wg, w.bg, w.wo, w.bo,
                np.zeros(57), np.ones(57), np.zeros(2), np.ones(2),
                np.zeros(59, bool),
            )

    def test_sm_output_dim(self):
        out = sm_forward(make_params(), np.zeros(57))
        assert out.shape == (11,)

    def test_sm_zero_weights(self):
        out = sm_forward(make_params(zero_weights=True), np.ones(57))
        assert np.array_equal(out, np.zeros(11))

    def test_sm_infer_deterministic(self):
        p = make_params(3)
        x = substream(1, "x").normal(size=57)
        assert np.array_equal(sm_forward(p, x), sm_forward(p, x))

    def test_dm_zero_difference(self):
        p = make_params(zero_weights=True)
        x = substream(2, "x").normal(size=57)
        t = dm_forward(p, np.zeros(2), x, x)
        assert t == 0.0

    def test_tanh_bound(self):
        p = make_params(5)
        rng = substream(3, "big")
        for scale in (1.0, 1e3, 1e6):
            t = dm_forward(
                p, rng.normal(size=2) * scale,
                rng.normal(size=57) * scale, rng.normal(size=57) * scale,
            )
            assert -1.0 <= t <= 1.0

    def test_dimension_errors(self):
        p = make_params()
        with pytest.raises(DimensionMismatch):
            sm_forward(p, np.zeros(56))
        with pytest.raises(DimensionMismatch):
            dm_forward(p, np.zeros(3), np.zeros(57), np.zeros(57))


class TestGradients:
    def test_all_parameters_match_finite_differences(self):
        w = _init_weights(3)
        xg, xa, xb, lab = training_arrays(8, seed=11)
        _, grads = loss_and_gradients(w, xg, xa, xb, lab)
        h = 1e-5
        worst = 0.0
        for name in _WEIGHT_SHAPES:
            arr = getattr(w, name)
            ana = getattr(grads, name).reshape(arr.shape)
            it = np.nditer(arr, flags=["multi_index"])
            for _ in it:
                ix = it.multi_index
                old = arr[ix]
                arr[ix] = old + h
                lp, _ = loss_and_gradients(w, xg, xa, xb, lab)
                arr[ix] = old - h
                lm, _ = loss_and_gradients(w, xg, xa, xb, lab)
                arr[ix] = old
                num = (lp - lm) / (2.0 * h)
                denom = max(abs(num), abs(float(ana[ix])))
                if denom > 1e-8:
                    worst = max(worst, abs(num - float(ana[ix])) / denom)
        assert worst < 1e-4

    def test_shared_masks_kill_identical_branches(self):
        # with one mask pair covering both branches, equal inputs give a
        # zero difference signal even in train mode
        w = _init_weights(1)
        rng = substream(4, "masks")
        x = rng.normal(size=(5, 57))
        xg = rng.normal(size=(5, 2))
        masks = (
            (rng.random((5, 57)) < 0.5) / 0.5,
            (rng.random((5, 15)) < 0.75) / 0.75,
        )
        t = dm_forward(w, xg, x, x, masks)
        aux_only = np.tanh(
            (xg @ w.wg + w.bg) @ w.wo[11:] + w.bo
        )[:, 0]
        assert np.allclose(t, aux_only, atol=1e-12)


class TestTraining:
    def test_overfit_single_pair(self):
        xg, xa, xb, _ = training_arrays(1, seed=7)
        res = train(xg, xa, xb, np.array([-1.0]), TrainConfig(epochs=500, seed=1))
        assert res.epoch_losses[-1] < 0.05
        assert np.isfinite(res.epoch_losses).all()
        assert len(res.epoch_losses) == 500

    def test_deterministic(self):
        data = training_arrays(40, seed=8)
        cfg = TrainConfig(epochs=20, seed=5)
        a = train(*data, cfg)
        b = train(*data, cfg)
        for k in _WEIGHT_SHAPES:
            assert np.array_equal(getattr(a.params, k), getattr(b.params, k))
        assert a.epoch_losses == b.epoch_losses

    def test_seed_sensitivity(self):
        data = training_arrays(40, seed=8)
        a = train(*data, TrainConfig(epochs=5, seed=5))
        b = train(*data, TrainConfig(epochs=5, seed=6))
        assert not np.array_equal(a.params.w1, b.params.w1)

    def test_empty_rejected(self):
        with pytest.raises(EmptyInput):
            train(np.zeros((0, 2)), np.zeros((0, 57)), np.zeros((0, 57)), np.zeros(0))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            train(np.zeros((3, 2)), np.zeros((3, 57)), np.zeros((2, 57)), np.zeros(3))

    def test_standardization_of_training_features(self):
        xg, xa, xb, lab = training_arrays(64, seed=9)
        res = train(xg, xa, xb, lab, TrainConfig(epochs=1, seed=0))
        p = res.params
        stacked = (np.vstack([xa, xb]) - p.feat_mean) / p.feat_std
        assert np.abs(stacked.mean(axis=0)).max() < 1e-6
        assert np.abs(stacked.std(axis=0) - 1.0).max() < 1e-6

    def test_zero_variance_flagged(self):
        xg, xa, xb, lab = training_arrays(16, seed=10)
        xa[:, 5] = 2.5
        xb[:, 5] = 2.5
        xg[:, 1] = 0.25
        res = train(xg, xa, xb, lab, TrainConfig(epochs=1, seed=0))
        assert res.params.zero_variance[5]
        assert res.params.zero_variance[57 + 1]
        assert res.params.feat_std[5] == 1.0
        assert not res.params.zero_variance[0]


class TestVerdict:
    def test_signs(self):
        assert verdict_from_t(-0.3).verdict == "A"
        assert verdict_from_t(0.3).verdict == "B"

    def test_zero_confidence(self):
        p = verdict_from_t(0.0)
        assert p.verdict == "B"
        assert p.zero_confidence
        assert not verdict_from_t(0.2).zero_confidence


class TestPersistence:
    def roundtrip(self, tmp_path):
        data = training_arrays(32, seed=12)
        res = train(*data, TrainConfig(epochs=3, seed=2))
        path = tmp_path / "model.json"
        save_model(res.params, path)
        return res.params, load_model(path), path

    def test_bit_identical_predictions(self, tmp_path):
        orig, back, _ = self.roundtrip(tmp_path)
        rng = substream(5, "rt")
        vg, va, vb = rng.normal(size=2), rng.normal(size=57), rng.normal(size=57)
        assert dm_infer(orig, vg, va, vb) == dm_infer(back, vg, va, vb)

    def test_corruption_detected(self, tmp_path):
        _, _, path = self.roundtrip(tmp_path)
        text = path.read_text().replace("0", "1", 1)
        path.write_text(text)
        with pytest.raises((ChecksumMismatch, VersionMismatch)):
            load_model(path)

    def test_feature_order_guard(self, tmp_path):
        import json

        _, _, path = self.roundtrip(tmp_path)
        payload = json.loads(path.read_text())
        payload["feature_order"] = "f" * 64
        path.write_text(json.dumps(payload))
        with pytest.raises(VersionMismatch):
            load_model(path)

    def test_version_guard(self, tmp_path):
        import json

        _, _, path = self.roundtrip(tmp_path)
        payload = json.loads(path.read_text())
        payload["version"] = MODEL_VERSION + 1
        path.write_text(json.dumps(payload))
        with pytest.raises(VersionMismatch):
            load_model(path)

    def test_magic_guard(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text('{"magic": "something-else"}')
        with pytest.raises(VersionMismatch):
            load_model(path)


class TestStandardizationHelper:
    def test_explicit_values(self):
        layout = np.array([[1.0] * 57, [3.0] * 57])
        graph = np.array([[0.0, 5.0], [2.0, 5.0]])
        std = compute_standardization(graph, layout)
        assert np.allclose(std.feat_mean, 2.0)
        assert np.allclose(std.feat_std, 1.0)
        assert std.zero_variance[57 + 1]
        assert std.graph_std[1] == 1.0
