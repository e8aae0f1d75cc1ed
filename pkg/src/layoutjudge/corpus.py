"""Corpus assembly and cross-validated evaluation of layout judges.

A corpus is a set of generated graphs, each with proper and garbage layouts,
the augmented layouts derived from them, and labeled pairs. Features and
quality metrics are computed once per layout at build time, so training and
evaluation touch only cached arrays.
"""

import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from ._parallel import parallel_map
from .augment import AugmentConfig, make_labeled_pairs
from .baselines import fit_sign_weights, quality_metrics, scale_invariant_stress
from .discriminator import TrainConfig, dm_infer, train
from .engines import (
    LayoutParams,
    layout_force_directed,
    layout_phantom,
    layout_random,
    layout_stress_min,
    normalize_layout,
)
from .errors import (
    EmptyInput,
    ParseError,
    TooFewGraphs,
    UnknownGroup,
    VersionMismatch,
)
from .features import (
    FEATURE_GROUPS,
    FeatureVector,
    feature_vector,
    read_feature_file,
    write_feature_file,
)
from .generators import GENERATOR_KINDS, GeneratorSpec, generate
from .graph import read_graph, read_layout, write_graph, write_layout
from .rng import substream

CORPUS_MAGIC = "layoutjudge-corpus"
CORPUS_VERSION = 1

# largest lattice target per quasi dimension that keeps the rounded extent
# from jumping past the corpus size cap
_METRIC_COLUMNS = ("cc", "cr", "ar", "el")


@dataclass(frozen=True)
class CorpusConfig:
    """What to build: generator kinds, sizes, and the augmentation recipe."""

    kinds: tuple = GENERATOR_KINDS
    graphs_per_kind: int = 11
    n_min: int = 16
    n_max: int = 400
    augment: AugmentConfig = field(default_factory=AugmentConfig)

    def __post_init__(self):
        object.__setattr__(self, "kinds", tuple(self.kinds))
        unknown = [k for k in self.kinds if k not in GENERATOR_KINDS]
        if unknown:
            raise ValueError(f"unknown generator kinds: {unknown}")
        if not self.kinds or self.graphs_per_kind < 1:
            raise ValueError("config must produce at least one graph")
        if not 2 <= self.n_min <= self.n_max:
            raise ValueError("need 2 <= n_min <= n_max")

    def to_json(self):
        payload = {
            "kinds": list(self.kinds),
            "graphs_per_kind": self.graphs_per_kind,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "augment": {
                "ladder_r": list(self.augment.ladder_r),
                "interp_r": list(self.augment.interp_r),
                "worsen_kinds": list(self.augment.worsen_kinds),
                "t_min": self.augment.t_min,
            },
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text):
        raw = json.loads(text)
        aug = raw.pop("augment")
        return cls(
            kinds=tuple(raw["kinds"]),
            graphs_per_kind=int(raw["graphs_per_kind"]),
            n_min=int(raw["n_min"]),
            n_max=int(raw["n_max"]),
            augment=AugmentConfig(
                ladder_r=tuple(aug["ladder_r"]),
                interp_r=tuple(aug["interp_r"]),
                worsen_kinds=tuple(aug["worsen_kinds"]),
                t_min=float(aug["t_min"]),
            ),
        )


def desk_config():
    """The default desk-scale corpus: ~120 graphs, buildable in minutes."""
    return CorpusConfig()


@dataclass(frozen=True)
class PairRecord:
    """One labeled comparison: negative t means layout a is prettier."""

    gid: str
    lid_a: str
    lid_b: str
    t: float
    source: str


@dataclass(frozen=True)
class CorpusGraph:
    """One graph with its layouts and everything cached about them."""

    gid: str
    spec: GeneratorSpec
    graph: object
    graph_features: np.ndarray
    layouts: dict
    features: dict
    metrics: dict
    sis: dict
    pairs: tuple


@dataclass(frozen=True)
class Corpus:
    config: CorpusConfig
    seed: int
    graphs: tuple

    @property
    def pairs(self):
        return [p for g in self.graphs for p in g.pairs]

    @property
    def gids(self):
        return tuple(g.gid for g in self.graphs)

    def graph_by_gid(self, gid):
        for g in self.graphs:
            if g.gid == gid:
                return g
        raise KeyError(gid)


def _kind_size_cap(kind, n_max):
    """Largest usable size target for a kind.

    Lattice generators round target^(1/dim) to an extent, so an unrestricted
    target can jump to extent^dim far above n_max; the cap keeps the realized
    vertex count within the configured range.
    """
    if kind.startswith("quasi"):
        dim = int(kind[5])
        extent = max(2, int(n_max ** (1.0 / dim)))
        return extent**dim
    return n_max


def _graph_spec(config, seed, kind, idx):
    rng = substream(seed, "corpus-spec", kind, idx)
    hi = max(config.n_min, _kind_size_cap(kind, config.n_max))
    target = int(round(math.exp(rng.uniform(math.log(config.n_min), math.log(hi)))))
    target = min(max(target, config.n_min), hi)
    gen_seed = int(rng.integers(2**31))
    if kind in ("grid", "torus1", "torus2"):
        rows = max(2, round(math.sqrt(target)))
        cols = max(2, round(target / rows))
        return GeneratorSpec(kind, seed=gen_seed, rows=rows, cols=cols)
    return GeneratorSpec(kind, seed=gen_seed, target_n=target)


def _build_graph_entry(job):
    config, seed, kind, idx = job
    gid = f"{kind}-{idx:02d}"
    spec = _graph_spec(config, seed, kind, idx)
    graph, native = generate(spec)

    seeds = substream(seed, "corpus-layouts", kind, idx)
    fdp_seed, stress_seed, phantom_seed, random_seed, aug_seed = (
        int(v) for v in seeds.integers(2**63, size=5)
    )
    base = {}
    if native is not None:
        base["native"] = normalize_layout(native, graph)
    base["fdp"] = layout_force_directed(graph, LayoutParams(seed=fdp_seed))
    base["stress"] = layout_stress_min(
        graph, LayoutParams(seed=stress_seed, iterations=200)
    )
    proper_tags = tuple(base.keys())
    base["phantom"] = layout_phantom(graph, phantom_seed)
    base["random"] = layout_random(
        graph, random_seed, dist="uniform" if idx % 2 == 0 else "normal"
    )
    base = {tag: replace(lay, graph_id=gid) for tag, lay in base.items()}

    proper = [base[t] for t in proper_tags]
    garbage = [base["phantom"], base["random"]]
    labeled = make_labeled_pairs(graph, proper, garbage, config.augment, seed=aug_seed)

    ids = {}
    layouts = {}
    for tag, lay in base.items():
        ids[id(lay)] = tag
        layouts[tag] = lay
    counter = 0
    pairs = []
    for pair in labeled:
        for obj in (pair.a, pair.b):
            if id(obj) not in ids:
                lid = f"aug{counter:03d}"
                counter += 1
                ids[id(obj)] = lid
                layouts[lid] = obj
        pairs.append(
            PairRecord(gid, ids[id(pair.a)], ids[id(pair.b)], pair.t, pair.source)
        )

    features = {}
    metrics = {}
    sis = {}
    graph_features = None
    for lid, lay in layouts.items():
        fv = feature_vector(graph, lay)
        features[lid] = fv.layout_features
        graph_features = fv.graph_features
        metrics[lid] = quality_metrics(graph, lay).as_array()
        sis[lid] = scale_invariant_stress(graph, lay)
    return CorpusGraph(
        gid=gid,
        spec=spec,
        graph=graph,
        graph_features=graph_features,
        layouts=layouts,
        features=features,
        metrics=metrics,
        sis=sis,
        pairs=tuple(pairs),
    )


def build_corpus(config, seed, workers=None):
    """Generate graphs, lay them out, augment, label, and cache features."""
    jobs = [
        (config, seed, kind, idx)
        for kind in config.kinds
        for idx in range(config.graphs_per_kind)
    ]
    graphs = parallel_map(_build_graph_entry, jobs, workers=workers)
    return Corpus(config=config, seed=seed, graphs=tuple(graphs))


# ------------------------------------------------------------- persistence


def _spec_fields(spec):
    return (
        f"kind={spec.kind} seed={spec.seed} "
        f"target={'-' if spec.target_n is None else spec.target_n} "
        f"rows={'-' if spec.rows is None else spec.rows} "
        f"cols={'-' if spec.cols is None else spec.cols}"
    )


def _parse_spec_fields(tokens):
    raw = dict(tok.split("=", 1) for tok in tokens)
    opt = lambda key: None if raw[key] == "-" else int(raw[key])
    return GeneratorSpec(
        kind=raw["kind"],
        seed=int(raw["seed"]),
        target_n=opt("target"),
        rows=opt("rows"),
        cols=opt("cols"),
    )


def save_corpus(corpus, out_dir):
    """Write the corpus directory: manifest, graph/layout files, caches."""
    os.makedirs(os.path.join(out_dir, "graphs"), exist_ok=True)
    config_line = f"config: seed={corpus.seed} {corpus.config.to_json()}"
    lines = [f"# {CORPUS_MAGIC} v{CORPUS_VERSION}", f"# {config_line}"]
    feature_records = []
    metric_lines = [f"# {config_line}", "# columns: layout cc cr ar el sis"]
    for entry in corpus.graphs:
        lines.append(
            f"graph {entry.gid} {_spec_fields(entry.spec)} "
            f"n={entry.graph.n} m={entry.graph.m}"
        )
        write_graph(
            os.path.join(out_dir, "graphs", f"{entry.gid}.txt"),
            entry.graph,
            comments=[f"graph: {entry.gid}", config_line],
        )
        lay_dir = os.path.join(out_dir, "layouts", entry.gid)
        os.makedirs(lay_dir, exist_ok=True)
        for lid, lay in entry.layouts.items():
            lines.append(f"layout {entry.gid}/{lid} provenance={lay.provenance}")
            write_layout(os.path.join(lay_dir, f"{lid}.txt"), lay)
            fv = FeatureVector(entry.features[lid], entry.graph_features)
            feature_records.append((f"{entry.gid}/{lid}", fv))
            cc, cr, ar, el = (float(v) for v in entry.metrics[lid])
            metric_lines.append(
                f"{entry.gid}/{lid}\t{int(cc)}\t{cr!r}\t{ar!r}\t{el!r}"
                f"\t{float(entry.sis[lid])!r}"
            )
        for p in entry.pairs:
            lines.append(f"pair {p.gid} {p.lid_a} {p.lid_b} {p.t!r} {p.source}")
    with open(os.path.join(out_dir, "manifest.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    write_feature_file(
        os.path.join(out_dir, "features.tsv"), feature_records, [config_line]
    )
    with open(os.path.join(out_dir, "metrics.tsv"), "w") as fh:
        fh.write("\n".join(metric_lines) + "\n")


def _parse_metrics_file(path):
    metrics = {}
    sis = {}
    with open(path) as fh:
        for number, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 6:
                raise ParseError(f"line {number}: expected 6 metric columns")
            metrics[cols[0]] = np.array([float(c) for c in cols[1:5]])
            sis[cols[0]] = float(cols[5])
    return metrics, sis


def load_corpus(in_dir):
    """Read a corpus directory written by save_corpus."""
    manifest_path = os.path.join(in_dir, "manifest.txt")
    with open(manifest_path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith(f"# {CORPUS_MAGIC} v"):
        raise VersionMismatch("not a corpus manifest")
    version = lines[0].rsplit(" v", 1)[1]
    if version != str(CORPUS_VERSION):
        raise VersionMismatch(f"unsupported corpus version {version}")
    header = lines[1]
    if not header.startswith("# config: seed="):
        raise ParseError("manifest missing config line")
    seed_token, config_json = header[len("# config: ") :].split(" ", 1)
    seed = int(seed_token.split("=", 1)[1])
    config = CorpusConfig.from_json(config_json)

    all_features = {
        rid: vec for rid, vec in read_feature_file(os.path.join(in_dir, "features.tsv"))
    }
    all_metrics, all_sis = _parse_metrics_file(os.path.join(in_dir, "metrics.tsv"))

    graphs = []
    current = None

    def finish(entry):
        if entry is not None:
            graphs.append(
                CorpusGraph(
                    gid=entry["gid"],
                    spec=entry["spec"],
                    graph=entry["graph"],
                    graph_features=entry["gfeat"],
                    layouts=entry["layouts"],
                    features=entry["features"],
                    metrics=entry["metrics"],
                    sis=entry["sis"],
                    pairs=tuple(entry["pairs"]),
                )
            )

    for number, line in enumerate(lines[2:], start=3):
        if not line or line.startswith("#"):
            continue
        tokens = line.split(" ")
        if tokens[0] == "graph":
            finish(current)
            gid = tokens[1]
            graph = read_graph(os.path.join(in_dir, "graphs", f"{gid}.txt"))
            current = {
                "gid": gid,
                "spec": _parse_spec_fields(tokens[2:7]),
                "graph": graph,
                "gfeat": None,
                "layouts": {},
                "features": {},
                "metrics": {},
                "sis": {},
                "pairs": [],
            }
        elif tokens[0] == "layout":
            rid = tokens[1]
            gid, lid = rid.split("/", 1)
            if current is None or gid != current["gid"]:
                raise ParseError(f"line {number}: layout outside its graph block")
            lay = read_layout(
                os.path.join(in_dir, "layouts", gid, f"{lid}.txt"), graph_id=gid
            )
            if rid not in all_features or rid not in all_metrics:
                raise ParseError(f"line {number}: no cached values for {rid}")
            fv = all_features[rid]
            current["layouts"][lid] = lay
            current["features"][lid] = fv.layout_features
            current["gfeat"] = fv.graph_features
            current["metrics"][lid] = all_metrics[rid]
            current["sis"][lid] = all_sis[rid]
        elif tokens[0] == "pair":
            gid, lid_a, lid_b, t_raw, source = tokens[1:6]
            if current is None or gid != current["gid"]:
                raise ParseError(f"line {number}: pair outside its graph block")
            if lid_a not in current["layouts"] or lid_b not in current["layouts"]:
                raise ParseError(f"line {number}: pair references unknown layout")
            current["pairs"].append(
                PairRecord(gid, lid_a, lid_b, float(t_raw), source)
            )
        else:
            raise ParseError(f"line {number}: unknown record {tokens[0]!r}")
    finish(current)
    return Corpus(config=config, seed=seed, graphs=tuple(graphs))


# ------------------------------------------------------------- evaluation


@dataclass(frozen=True)
class EvalDataset:
    """Flat per-pair arrays extracted from a corpus for fast evaluation."""

    gids: tuple
    pair_gidx: np.ndarray
    t: np.ndarray
    sources: np.ndarray
    xg: np.ndarray
    xa: np.ndarray
    xb: np.ndarray
    qa: np.ndarray
    qb: np.ndarray
    sa: np.ndarray
    sb: np.ndarray


def eval_dataset(corpus):
    """Flatten a corpus into the arrays every judge consumes."""
    if isinstance(corpus, EvalDataset):
        return corpus
    gidx, t, sources = [], [], []
    xg, xa, xb, qa, qb, sa, sb = [], [], [], [], [], [], []
    for gi, entry in enumerate(corpus.graphs):
        for p in entry.pairs:
            gidx.append(gi)
            t.append(p.t)
            sources.append(p.source)
            xg.append(entry.graph_features)
            xa.append(entry.features[p.lid_a])
            xb.append(entry.features[p.lid_b])
            qa.append(entry.metrics[p.lid_a])
            qb.append(entry.metrics[p.lid_b])
            sa.append(entry.sis[p.lid_a])
            sb.append(entry.sis[p.lid_b])
    if not t:
        raise EmptyInput("corpus has no pairs")
    return EvalDataset(
        gids=tuple(corpus.gids),
        pair_gidx=np.array(gidx, dtype=np.int32),
        t=np.array(t),
        sources=np.array(sources),
        xg=np.array(xg),
        xa=np.array(xa),
        xb=np.array(xb),
        qa=np.array(qa),
        qb=np.array(qb),
        sa=np.array(sa),
        sb=np.array(sb),
    )


def accuracy(t_pred, t_label):
    """Fraction of sign agreements; an undecided prediction counts as wrong."""
    t_pred = np.asarray(t_pred, dtype=np.float64)
    t_label = np.asarray(t_label, dtype=np.float64)
    if t_pred.size == 0:
        raise EmptyInput("no pairs to score")
    pred = np.sign(t_pred)
    return float(((pred == np.sign(t_label)) & (pred != 0)).mean())


def _split_gid_indices(count, test_fraction, seed):
    if count < 5:
        raise TooFewGraphs(f"need at least 5 graphs, have {count}")
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    n_test = min(max(int(round(count * test_fraction)), 1), count - 1)
    order = substream(seed, "graph-split").permutation(count)
    return np.sort(order[n_test:]), np.sort(order[:n_test])


def split_by_graph(corpus, test_fraction, seed):
    """Split pairs at graph granularity: no graph appears on both sides."""
    graphs = corpus.graphs
    train_idx, test_idx = _split_gid_indices(len(graphs), test_fraction, seed)
    train = [p for gi in train_idx for p in graphs[gi].pairs]
    test = [p for gi in test_idx for p in graphs[gi].pairs]
    return train, test


# Judges. Every judge maps (dataset, train mask, test mask, fold seed) to a
# score per test pair whose sign picks the winner: negative means the first
# layout of the pair.


@dataclass(frozen=True)
class ModelMethod:
    """The trained neural judge, optionally with masked feature groups."""

    name: str = "model"
    train_config: TrainConfig = field(default_factory=TrainConfig)
    keep: tuple = None

    def _masked(self, x):
        if self.keep is None:
            return x
        mask = np.zeros(x.shape[1])
        mask[list(self.keep)] = 1.0
        return x * mask

    def fold_scores(self, ds, train_mask, test_mask, fold_seed):
        xa = self._masked(ds.xa)
        xb = self._masked(ds.xb)
        config = replace(self.train_config, seed=fold_seed)
        result = train(
            ds.xg[train_mask],
            xa[train_mask],
            xb[train_mask],
            ds.t[train_mask],
            config,
        )
        return dm_infer(
            result.params, ds.xg[test_mask], xa[test_mask], xb[test_mask]
        )


@dataclass(frozen=True)
class StressMethod:
    """Scale-invariant stress comparison; lower stress wins. No fitting."""

    name: str = "stress"

    def fold_scores(self, ds, train_mask, test_mask, fold_seed):
        sa = ds.sa[test_mask]
        sb = ds.sb[test_mask]
        total = sa + sb
        return np.where(total > 0.0, (sa - sb) / np.where(total > 0, total, 1.0), 0.0)


@dataclass(frozen=True)
class CombMethod:
    """Weighted z-scored quality metrics with weights fitted per fold."""

    name: str = "comb"
    restarts: int = 10
    iterations: int = 200

    def fold_scores(self, ds, train_mask, test_mask, fold_seed):
        signs = np.sign(ds.qa - ds.qb)
        weights = fit_sign_weights(
            signs[train_mask],
            np.sign(ds.t[train_mask]),
            seed=fold_seed,
            restarts=self.restarts,
            iterations=self.iterations,
        )
        return 2.0 * (signs[test_mask] @ weights.as_array())


@dataclass(frozen=True)
class OracleMethod:
    """Reads the labels; the harness sanity ceiling (or floor when inverted)."""

    name: str = "oracle"
    invert: bool = False

    def fold_scores(self, ds, train_mask, test_mask, fold_seed):
        return -ds.t[test_mask] if self.invert else ds.t[test_mask]


@dataclass(frozen=True)
class CoinFlipMethod:
    """Seeded random verdicts; the harness sanity chance level."""

    name: str = "coin-flip"

    def fold_scores(self, ds, train_mask, test_mask, fold_seed):
        rng = substream(fold_seed, "coin-flip")
        return rng.choice(np.array([-1.0, 1.0]), size=int(test_mask.sum()))


@dataclass(frozen=True)
class EvalReport:
    """Cross-validation outcome for one judging method."""

    method: str
    fold_accuracies: tuple
    fold_test_pairs: tuple
    source_accuracies: tuple

    def __post_init__(self):
        if len(self.fold_accuracies) < 2:
            raise ValueError("need at least two folds")
        if any(not 0.0 <= a <= 1.0 for a in self.fold_accuracies):
            raise ValueError("accuracies must lie in [0,1]")

    @property
    def folds(self):
        return len(self.fold_accuracies)

    @property
    def mean(self):
        return float(np.mean(self.fold_accuracies))

    @property
    def std(self):
        return float(np.std(self.fold_accuracies))

    def source_mean(self, source):
        for name, value in self.source_accuracies:
            if name == source:
                return value
        raise KeyError(source)


def _fold_job(job):
    ds, method, fold_seed, test_fraction = job
    train_idx, test_idx = _split_gid_indices(len(ds.gids), test_fraction, fold_seed)
    in_test = np.zeros(len(ds.gids), dtype=bool)
    in_test[test_idx] = True
    test_mask = in_test[ds.pair_gidx]
    train_mask = ~test_mask
    t_pred = np.asarray(method.fold_scores(ds, train_mask, test_mask, fold_seed))
    t_true = ds.t[test_mask]
    fold_acc = accuracy(t_pred, t_true)
    per_source = {}
    test_sources = ds.sources[test_mask]
    for source in np.unique(test_sources):
        sel = test_sources == source
        per_source[str(source)] = accuracy(t_pred[sel], t_true[sel])
    return fold_acc, int(test_mask.sum()), per_source


def cross_validate(corpus, method, rounds=10, test_fraction=0.2, seed=0,
                   workers=None):
    """Random-subsample cross validation: independent rounds, fresh fits.

    Each round sets aside test_fraction of the graphs (with every pair they
    touch), fits the method on the rest, and scores the held-out pairs.
    Rounds are independent draws, not a partition.
    """
    if rounds < 2:
        raise ValueError("need at least two rounds")
    ds = eval_dataset(corpus)
    fold_seeds = [
        int(v) for v in substream(seed, "cv-folds").integers(2**63, size=rounds)
    ]
    results = parallel_map(
        _fold_job,
        [(ds, method, fs, test_fraction) for fs in fold_seeds],
        workers=workers,
    )
    accs = tuple(r[0] for r in results)
    sizes = tuple(r[1] for r in results)
    sources = sorted({s for r in results for s in r[2]})
    per_source = tuple(
        (s, float(np.mean([r[2][s] for r in results if s in r[2]]))) for s in sources
    )
    return EvalReport(
        method=method.name,
        fold_accuracies=accs,
        fold_test_pairs=sizes,
        source_accuracies=per_source,
    )


def ablation(corpus, mode, groups, rounds=10, test_fraction=0.2, seed=0,
             train_config=None, workers=None):
    """Evaluate the model with feature groups kept alone or removed.

    mode "only" zeroes every layout feature outside the named groups; mode
    "exclude" zeroes exactly the named groups. Graph features always stay.
    """
    if mode not in ("only", "exclude"):
        raise ValueError("mode must be 'only' or 'exclude'")
    if isinstance(groups, str):
        groups = (groups,)
    groups = tuple(groups)
    for name in groups:
        if name not in FEATURE_GROUPS:
            raise UnknownGroup(
                f"unknown feature group {name!r}; known: {sorted(FEATURE_GROUPS)}"
            )
    selected = sorted({i for name in groups for i in FEATURE_GROUPS[name]})
    if mode == "only":
        keep = tuple(selected)
    else:
        keep = tuple(i for i in range(57) if i not in selected)
    label = "+".join(sorted(groups)) if groups else "none"
    method = ModelMethod(
        name=f"{mode}-{label}",
        train_config=train_config or TrainConfig(),
        keep=keep,
    )
    return cross_validate(
        corpus, method, rounds=rounds, test_fraction=test_fraction, seed=seed,
        workers=workers,
    )


# --------------------------------------------------------------- reporting


def render_eval_text(reports):
    """Aligned text table; advantage is the first row's mean minus the row's."""
    if not reports:
        raise EmptyInput("no reports to render")
    rows = [("method", "accuracy", "folds", "advantage")]
    reference = reports[0].mean
    for i, rep in enumerate(reports):
        adv = "-" if i == 0 else f"{reference - rep.mean:+.4f}"
        rows.append(
            (rep.method, f"{rep.mean:.4f} +- {rep.std:.4f}", str(rep.folds), adv)
        )
    widths = [max(len(r[c]) for r in rows) for c in range(4)]
    lines = [
        "  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip()
        for row in rows
    ]
    lines.append("")
    for rep in reports:
        folds = " ".join(f"{a:.4f}" for a in rep.fold_accuracies)
        lines.append(f"{rep.method} fold accuracies: {folds}")
        for source, value in rep.source_accuracies:
            lines.append(f"{rep.method} source {source}: {value:.4f}")
    return "\n".join(lines) + "\n"


def render_eval_csv(reports):
    """The same table as comma-separated values."""
    if not reports:
        raise EmptyInput("no reports to render")
    reference = reports[0].mean
    lines = ["method,accuracy_mean,accuracy_std,folds,advantage,fold_accuracies"]
    for i, rep in enumerate(reports):
        adv = "" if i == 0 else f"{reference - rep.mean:+.4f}"
        folds = ";".join(f"{a:.4f}" for a in rep.fold_accuracies)
        lines.append(
            f"{rep.method},{rep.mean:.4f},{rep.std:.4f},{rep.folds},{adv},{folds}"
        )
    return "\n".join(lines) + "\n"
