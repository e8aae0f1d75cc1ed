"""Siamese neural discriminator over layout feature vectors.

Two copies of a shared encoder (SM) turn the 57 layout features of each
drawing into an 11-dim signature; their difference, concatenated with a
2-dim graph embedding, feeds a single tanh output (GM).  Negative output
means the first layout is judged prettier.  The whole network has exactly
1066 trainable parameters, which is asserted at construction.

Everything is plain numpy: batched forward, hand-derived backprop, SGD
with momentum.  Dropout uses the inverted convention (masks scaled at
train time), making inference a pure deterministic pass.  Within one
training example the same dropout masks apply to both Siamese branches,
so the difference signal stays meaningful.
"""

import hashlib
import json
from dataclasses import dataclass, field
from types import SimpleNamespace

import numpy as np

from .errors import (
    ChecksumMismatch,
    DimensionMismatch,
    EmptyInput,
    VersionMismatch,
)
from .features import FEATURE_ORDER_HASH, feature_vector
from .rng import substream

LAYOUT_DIM = 57
GRAPH_DIM = 2
HIDDEN_DIM = 15
SIGNATURE_DIM = 11
CONCAT_DIM = SIGNATURE_DIM + GRAPH_DIM
PARAM_COUNT = 1066

MODEL_MAGIC = "layoutjudge-model"
MODEL_VERSION = 1

_WEIGHT_SHAPES = {
    "w1": (LAYOUT_DIM, HIDDEN_DIM),
    "b1": (HIDDEN_DIM,),
    "w2": (HIDDEN_DIM, SIGNATURE_DIM),
    "b2": (SIGNATURE_DIM,),
    "wg": (GRAPH_DIM, GRAPH_DIM),
    "bg": (GRAPH_DIM,),
    "wo": (CONCAT_DIM, 1),
    "bo": (1,),
}


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    batch_size: int = 64
    epochs: int = 100
    momentum: float = 0.9
    dropout: tuple = (0.5, 0.25)
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.epochs < 1:
            raise ValueError("learning rate, batch size, epochs must be positive")


@dataclass(frozen=True)
class ModelParams:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    wg: np.ndarray
    bg: np.ndarray
    wo: np.ndarray
    bo: np.ndarray
    feat_mean: np.ndarray
    feat_std: np.ndarray
    graph_mean: np.ndarray
    graph_std: np.ndarray
    zero_variance: np.ndarray

    def __post_init__(self):
        for name, shape in _WEIGHT_SHAPES.items():
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.shape != shape:
                raise DimensionMismatch(f"{name}: expected {shape}, got {arr.shape}")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        for name, dim in (
            ("feat_mean", LAYOUT_DIM),
            ("feat_std", LAYOUT_DIM),
            ("graph_mean", GRAPH_DIM),
            ("graph_std", GRAPH_DIM),
        ):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            if arr.shape != (dim,):
                raise DimensionMismatch(f"{name}: expected ({dim},)")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        zv = np.ascontiguousarray(self.zero_variance, dtype=bool)
        if zv.shape != (LAYOUT_DIM + GRAPH_DIM,):
            raise DimensionMismatch("zero_variance: expected (59,)")
        zv.flags.writeable = False
        object.__setattr__(self, "zero_variance", zv)
        if (self.feat_std <= 0).any() or (self.graph_std <= 0).any():
            raise ValueError("standardization stddev entries must be positive")
        assert self.param_count == PARAM_COUNT

    @property
    def param_count(self):
        return sum(getattr(self, n).size for n in _WEIGHT_SHAPES)


def _glorot(rng, shape):
    limit = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-limit, limit, size=shape)


def _init_weights(seed):
    rng = substream(seed, "init")
    w = SimpleNamespace()
    w.w1 = _glorot(rng, _WEIGHT_SHAPES["w1"])
    w.b1 = np.zeros(HIDDEN_DIM)
    w.w2 = _glorot(rng, _WEIGHT_SHAPES["w2"])
    w.b2 = np.zeros(SIGNATURE_DIM)
    w.wg = _glorot(rng, _WEIGHT_SHAPES["wg"])
    w.bg = np.zeros(GRAPH_DIM)
    w.wo = _glorot(rng, _WEIGHT_SHAPES["wo"])
    w.bo = np.zeros(1)
    return w


def _as_batch(x, dim, name):
    arr = np.asarray(x, dtype=np.float64)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DimensionMismatch(f"{name}: expected (*, {dim}) input")
    return arr, squeeze


def sm_forward(params, x, masks=None):
    """Shared encoder: dropout, dense 57->15 linear, dropout, dense 15->11 ReLU.

    `x` must already be standardized.  With masks=None (inference) dropout
    is the identity; during training pass the two inverted-dropout masks.
    """
    arr, squeeze = _as_batch(x, LAYOUT_DIM, "sm input")
    m1 = masks[0] if masks else 1.0
    m2 = masks[1] if masks else 1.0
    hidden = (arr * m1) @ params.w1 + params.b1
    sig = np.maximum((hidden * m2) @ params.w2 + params.b2, 0.0)
    return sig[0] if squeeze else sig


def dm_forward(params, xg, xa, xb, masks=None):
    """Full discriminator on standardized inputs; returns t in [-1, 1]."""
    xg, squeeze = _as_batch(xg, GRAPH_DIM, "graph input")
    xa, _ = _as_batch(xa, LAYOUT_DIM, "layout a input")
    xb, _ = _as_batch(xb, LAYOUT_DIM, "layout b input")
    sig_a = sm_forward(params, xa, masks)
    sig_b = sm_forward(params, xb, masks)
    aux = xg @ params.wg + params.bg
    cat = np.concatenate([sig_a - sig_b, aux], axis=1)
    t = np.tanh(cat @ params.wo + params.bo)[:, 0]
    return float(t[0]) if squeeze else t


def _forward_cache(params, xg, xa, xb, masks):
    m1 = masks[0] if masks else 1.0
    m2 = masks[1] if masks else 1.0
    xa_d = xa * m1
    xb_d = xb * m1
    ha = (xa_d @ params.w1 + params.b1) * m2
    hb = (xb_d @ params.w1 + params.b1) * m2
    pre_a = ha @ params.w2 + params.b2
    pre_b = hb @ params.w2 + params.b2
    sig_a = np.maximum(pre_a, 0.0)
    sig_b = np.maximum(pre_b, 0.0)
    aux = xg @ params.wg + params.bg
    cat = np.concatenate([sig_a - sig_b, aux], axis=1)
    t = np.tanh(cat @ params.wo + params.bo)[:, 0]
    return SimpleNamespace(
        xg=xg, xa_d=xa_d, xb_d=xb_d, m2=m2, ha=ha, hb=hb,
        pre_a=pre_a, pre_b=pre_b, cat=cat, t=t,
    )


def loss_and_gradients(params, xg, xa, xb, labels, masks=None):
    """Batch MSE loss and its analytic gradients for every weight array."""
    c = _forward_cache(params, xg, xa, xb, masks)
    n = labels.shape[0]
    err = c.t - labels
    loss = float((err**2).mean())
    d_u = (2.0 * err / n) * (1.0 - c.t**2)
    d_u = d_u[:, None]
    g = SimpleNamespace()
    g.wo = c.cat.T @ d_u
    g.bo = d_u.sum(axis=0)
    d_cat = d_u @ params.wo.T
    d_diff = d_cat[:, :SIGNATURE_DIM]
    d_aux = d_cat[:, SIGNATURE_DIM:]
    g.wg = c.xg.T @ d_aux
    g.bg = d_aux.sum(axis=0)
    d_pre_a = d_diff * (c.pre_a > 0.0)
    d_pre_b = -d_diff * (c.pre_b > 0.0)
    g.w2 = c.ha.T @ d_pre_a + c.hb.T @ d_pre_b
    g.b2 = d_pre_a.sum(axis=0) + d_pre_b.sum(axis=0)
    d_ha = (d_pre_a @ params.w2.T) * c.m2
    d_hb = (d_pre_b @ params.w2.T) * c.m2
    g.w1 = c.xa_d.T @ d_ha + c.xb_d.T @ d_hb
    g.b1 = d_ha.sum(axis=0) + d_hb.sum(axis=0)
    return loss, g


@dataclass(frozen=True)
class Standardization:
    feat_mean: np.ndarray
    feat_std: np.ndarray
    graph_mean: np.ndarray
    graph_std: np.ndarray
    zero_variance: np.ndarray


def compute_standardization(graph_feats, layout_feats):
    """Per-dimension mean/std; zero-variance dimensions get std 1 and a flag."""
    fm = layout_feats.mean(axis=0)
    fs = layout_feats.std(axis=0)
    gm = graph_feats.mean(axis=0)
    gs = graph_feats.std(axis=0)
    flags = np.concatenate([fs == 0.0, gs == 0.0])
    fs = np.where(fs == 0.0, 1.0, fs)
    gs = np.where(gs == 0.0, 1.0, gs)
    return Standardization(fm, fs, gm, gs, flags)


@dataclass(frozen=True)
class TrainResult:
    params: ModelParams
    epoch_losses: list = field(default_factory=list)


def train(graph_feats, feats_a, feats_b, labels, config=TrainConfig()):
    """Fit the discriminator on raw (unstandardized) feature arrays.

    graph_feats: (N,2); feats_a/feats_b: (N,57); labels: (N,) in [-1,1].
    Standardization is computed from these training arrays only and is
    stored inside the returned ModelParams.
    """
    xg_raw = np.asarray(graph_feats, dtype=np.float64)
    xa_raw = np.asarray(feats_a, dtype=np.float64)
    xb_raw = np.asarray(feats_b, dtype=np.float64)
    t_lab = np.asarray(labels, dtype=np.float64)
    n = t_lab.shape[0]
    if n == 0:
        raise EmptyInput("training requires at least one labeled pair")
    if not (xg_raw.shape == (n, GRAPH_DIM) and xa_raw.shape == (n, LAYOUT_DIM)
            and xb_raw.shape == (n, LAYOUT_DIM)):
        raise DimensionMismatch("training arrays disagree on shape")

    std = compute_standardization(xg_raw, np.vstack([xa_raw, xb_raw]))
    xg = (xg_raw - std.graph_mean) / std.graph_std
    xa = (xa_raw - std.feat_mean) / std.feat_std
    xb = (xb_raw - std.feat_mean) / std.feat_std

    w = _init_weights(config.seed)
    vel = {k: np.zeros_like(getattr(w, k)) for k in _WEIGHT_SHAPES}
    rng = substream(config.seed, "train")
    keep1, keep2 = 1.0 - config.dropout[0], 1.0 - config.dropout[1]

    losses = []
    for _ in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for lo in range(0, n, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            b = idx.size
            masks = (
                (rng.random((b, LAYOUT_DIM)) < keep1) / keep1,
                (rng.random((b, HIDDEN_DIM)) < keep2) / keep2,
            )
            loss, grads = loss_and_gradients(
                w, xg[idx], xa[idx], xb[idx], t_lab[idx], masks
            )
            total += loss * b
            for k in _WEIGHT_SHAPES:
                vel[k] = config.momentum * vel[k] - config.learning_rate * getattr(
                    grads, k
                )
                setattr(w, k, getattr(w, k) + vel[k])
        losses.append(total / n)

    params = ModelParams(
        w.w1, w.b1, w.w2, w.b2, w.wg, w.bg, w.wo, w.bo,
        std.feat_mean, std.feat_std, std.graph_mean, std.graph_std,
        std.zero_variance,
    )
    return TrainResult(params, losses)


def standardize_inputs(params, vg, va, vb):
    vg = (np.asarray(vg, dtype=np.float64) - params.graph_mean) / params.graph_std
    va = (np.asarray(va, dtype=np.float64) - params.feat_mean) / params.feat_std
    vb = (np.asarray(vb, dtype=np.float64) - params.feat_mean) / params.feat_std
    return vg, va, vb


def dm_infer(params, vg, va, vb):
    """Inference on raw feature vectors (single or batched)."""
    return dm_forward(params, *standardize_inputs(params, vg, va, vb))


@dataclass(frozen=True)
class Prediction:
    t: float
    verdict: str
    zero_confidence: bool = False


def verdict_from_t(t):
    return Prediction(float(t), "A" if t < 0.0 else "B", zero_confidence=t == 0.0)


def predict(params, graph, lay_a, lay_b):
    """Judge two drawings of one graph: verdict A means the first is prettier."""
    fa = feature_vector(graph, lay_a)
    fb = feature_vector(graph, lay_b)
    t = dm_infer(params, fa.graph_features, fa.layout_features, fb.layout_features)
    return verdict_from_t(t)


def _model_payload(params):
    return {
        "magic": MODEL_MAGIC,
        "version": MODEL_VERSION,
        "feature_order": FEATURE_ORDER_HASH,
        "param_count": PARAM_COUNT,
        "standardization": {
            "feat_mean": params.feat_mean.tolist(),
            "feat_std": params.feat_std.tolist(),
            "graph_mean": params.graph_mean.tolist(),
            "graph_std": params.graph_std.tolist(),
            "zero_variance": params.zero_variance.astype(int).tolist(),
        },
        "weights": {k: getattr(params, k).tolist() for k in _WEIGHT_SHAPES},
    }


def _checksum(payload):
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(body.encode()).hexdigest()


def save_model(params, path, metadata=None):
    """Write the model as JSON; metadata (if given) is checksummed with it."""
    payload = _model_payload(params)
    if metadata is not None:
        payload["metadata"] = metadata
    payload["checksum"] = _checksum(dict(payload))
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        payload = json.load(fh)
    stored = payload.pop("checksum", None)
    if payload.get("magic") != MODEL_MAGIC:
        raise VersionMismatch("not a model file")
    if payload.get("version") != MODEL_VERSION:
        raise VersionMismatch(f"unsupported model version {payload.get('version')!r}")
    if payload.get("feature_order") != FEATURE_ORDER_HASH:
        raise VersionMismatch("model was trained with a different feature order")
    if stored != _checksum(payload):
        raise ChecksumMismatch("model file is corrupted")
    std = payload["standardization"]
    weights = payload["weights"]
    return ModelParams(
        *[np.asarray(weights[k], dtype=np.float64) for k in _WEIGHT_SHAPES],
        np.asarray(std["feat_mean"]),
        np.asarray(std["feat_std"]),
        np.asarray(std["graph_mean"]),
        np.asarray(std["graph_std"]),
        np.asarray(std["zero_variance"], dtype=bool),
    )
