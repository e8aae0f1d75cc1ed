"""Fixed-order feature vectors summarizing a drawn graph.

Each syndrome is reduced to a handful of statistics: arithmetic mean,
root mean square, and an entropy regression describing how histogram
entropy grows with bin count.  Local pairwise-distance syndromes use a
kernel-density differential entropy instead of the regression pair.
The resulting layout vector has exactly 57 entries in a frozen order;
two graph-level entries (log vertex and edge counts) ride along.

The column order is a compatibility contract: trained models store a
hash of it and refuse feature files with a different arrangement.
"""

import hashlib
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .engines import normalize_layout
from .errors import EmptyInput, ParseError
from .graph import pairwise_distances
from .syndromes import angular, edge_length, princomp, principal_axes

BETA_LADDER = (8, 16, 32, 64, 128, 256, 512)
RDF_LOCAL_BOUNDS = tuple(2**i for i in range(10))
KDE_GRID_POINTS = 1024
KDE_EXACT_LIMIT = 4096
_KDE_BINS = 4096

_STAT_SUFFIXES = ("mean", "rms", "entropy_intercept", "entropy_slope")


def _names():
    names = [
        "prinvec1_x",
        "prinvec1_y",
        "prinvec2_x",
        "prinvec2_y",
    ]
    for block in ("princomp1", "princomp2", "angular"):
        names += [f"{block}_{s}" for s in _STAT_SUFFIXES]
    names += [f"edge_length_{s}" for s in _STAT_SUFFIXES[1:]]
    for block in ("rdf_global", "tension"):
        names += [f"{block}_{s}" for s in _STAT_SUFFIXES]
    for d in RDF_LOCAL_BOUNDS:
        names += [f"rdf_local_{d}_{s}" for s in ("mean", "rms", "diff_entropy")]
    return tuple(names)


FEATURE_NAMES = _names()
GRAPH_FEATURE_NAMES = ("log_n", "log_m")
assert len(FEATURE_NAMES) == 57

FEATURE_GROUPS = {
    "prinvec": tuple(range(0, 4)),
    "princomp1": tuple(range(4, 8)),
    "princomp2": tuple(range(8, 12)),
    "angular": tuple(range(12, 16)),
    "edge_length": tuple(range(16, 19)),
    "rdf_global": tuple(range(19, 23)),
    "tension": tuple(range(23, 27)),
    "rdf_local": tuple(range(27, 57)),
}

FEATURE_ORDER_HASH = hashlib.sha256(
    ",".join(FEATURE_NAMES + GRAPH_FEATURE_NAMES).encode()
).hexdigest()


@dataclass(frozen=True)
class FeatureVector:
    layout_features: np.ndarray
    graph_features: np.ndarray

    def __post_init__(self):
        lf = np.ascontiguousarray(self.layout_features, dtype=np.float64)
        gf = np.ascontiguousarray(self.graph_features, dtype=np.float64)
        if lf.shape != (57,) or gf.shape != (2,):
            raise ValueError("feature vector must be 57 + 2 values")
        if not (np.isfinite(lf).all() and np.isfinite(gf).all()):
            raise ValueError("feature vector must be finite")
        lf.flags.writeable = False
        gf.flags.writeable = False
        object.__setattr__(self, "layout_features", lf)
        object.__setattr__(self, "graph_features", gf)

    @property
    def combined(self):
        return np.concatenate([self.layout_features, self.graph_features])


def histogram(values, bins):
    """Normalized counts over equal-width bins spanning [min, max].

    The maximum value lands in the last bin; a degenerate span (all values
    equal) puts all mass in bin 0.
    """
    s = np.asarray(values, dtype=np.float64)
    if s.size == 0:
        raise EmptyInput("cannot histogram an empty value set")
    if bins < 1:
        raise ValueError("bin count must be positive")
    lo, hi = float(s.min()), float(s.max())
    counts = np.zeros(bins, dtype=np.float64)
    # a span too narrow to cut into `bins` distinct edges is constant too
    if lo == hi or (np.diff(np.linspace(lo, hi, bins + 1)) <= 0.0).any():
        counts[0] = 1.0
        return counts
    raw, _ = np.histogram(s, bins=bins, range=(lo, hi))
    return raw / s.size


def entropy(hist):
    """Shannon entropy in bits; empty bins contribute nothing."""
    p = np.asarray(hist, dtype=np.float64)
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def _fit_line(entropies):
    # least squares of entropy against log2(bins) over the ladder
    x = np.log2(np.asarray(BETA_LADDER, dtype=np.float64))
    slope, intercept = np.polyfit(x, np.asarray(entropies, dtype=np.float64), 1)
    return float(intercept), float(slope)


def entropy_regression(values):
    """(intercept, slope) of histogram entropy as a function of log2 bins."""
    s = np.asarray(values, dtype=np.float64)
    if s.size == 0:
        raise EmptyInput("cannot regress an empty value set")
    if float(s.min()) == float(s.max()):
        return 0.0, 0.0
    return _fit_line([entropy(histogram(s, b)) for b in BETA_LADDER])


def _kde_density(grid, centers, weights, sigma):
    z = (grid[:, None] - centers[None, :]) / sigma
    return (np.exp(-0.5 * z * z) * weights).sum(axis=1)


def _binned_density(grid, s, lo, hi, sigma):
    """Kernel sum over a uniform center lattice, via FFT convolution.

    Each value splits its mass between the two nearest of 4096 equally
    spaced centers spanning [lo, hi]; the lattice is padded out to the grid
    span, convolved with the kernel sampled on the same spacing (truncated
    at 8 widths), and the result is interpolated onto the grid.
    """
    t = (s - lo) / (hi - lo) * (_KDE_BINS - 1)
    idx = np.minimum(t.astype(np.int64), _KDE_BINS - 2)
    frac = t - idx
    w = np.bincount(idx, weights=1.0 - frac, minlength=_KDE_BINS)
    w += np.bincount(idx + 1, weights=frac, minlength=_KDE_BINS)
    spacing = (hi - lo) / (_KDE_BINS - 1)
    pad = int(np.ceil(4.0 * sigma / spacing)) + 1
    lattice = lo + np.arange(-pad, _KDE_BINS + pad) * spacing
    padded = np.concatenate([np.zeros(pad), w, np.zeros(pad)])
    half = min(int(np.ceil(8.0 * sigma / spacing)), padded.size - 1)
    z = np.arange(-half, half + 1) * (spacing / sigma)
    dens = fftconvolve(padded, np.exp(-0.5 * z * z), mode="same")
    return np.interp(grid, lattice, np.maximum(dens, 0.0))


def _diff_entropy_impl(s, exact):
    sigma = 3.5 * float(s.std()) * s.size ** (-1.0 / 3.0)
    lo, hi = float(s.min()), float(s.max())
    grid = np.linspace(lo - 4.0 * sigma, hi + 4.0 * sigma, KDE_GRID_POINTS)
    if exact:
        dens = _kde_density(grid, s, np.ones(s.size), sigma)
    else:
        dens = _binned_density(grid, s, lo, hi, sigma)
    dens /= s.size * sigma * math.sqrt(2.0 * math.pi)
    mass = np.zeros_like(dens)
    pos = dens > 0.0
    mass[pos] = -dens[pos] * np.log2(dens[pos])
    return float(np.trapezoid(mass, grid))


def differential_entropy(values):
    """Kernel-density differential entropy in bits.

    Gaussian kernel with Scott-rule width 3.5*std*|S|^(-1/3), evaluated on
    a 1024-point grid padded by 4 widths, integrated by the trapezoid rule.
    Degenerate input (fewer than two values, or spread at or below float
    resolution) yields 0.  Large inputs are binned first; the approximation
    error is far below the tolerances used anywhere downstream.
    """
    s = np.asarray(values, dtype=np.float64)
    lo, hi = (float(s.min()), float(s.max())) if s.size else (0.0, 0.0)
    if (
        s.size < 2
        or lo == hi
        or (np.diff(np.linspace(lo, hi, _KDE_BINS)) <= 0.0).any()
    ):
        return 0.0
    return _diff_entropy_impl(s, exact=s.size <= KDE_EXACT_LIMIT)


def _stats4(values):
    mu = float(values.mean())
    rho = float(np.sqrt((values**2).mean()))
    eta, sig = entropy_regression(values)
    return [mu, rho, eta, sig]


def feature_vector(graph, layout):
    """The 57 layout features plus (log n, log m) for one drawing.

    The layout is re-normalized defensively; pass normalized layouts to
    make that a no-op.  Requires a connected graph.
    """
    lay = normalize_layout(layout, graph)
    axes = principal_axes(lay)
    p1, p2 = princomp(lay)
    ang = angular(graph, lay)
    el = edge_length(graph, lay)

    dmat = graph.distance_matrix()
    iu, ju = np.triu_indices(graph.n, k=1)
    gdist = dmat[iu, ju].astype(np.float64)
    euclid = pairwise_distances(lay)

    out = list(axes.v1) + list(axes.v2)
    out += _stats4(p1)
    out += _stats4(p2)
    out += _stats4(ang)
    out += _stats4(el)[1:]
    out += _stats4(euclid)
    out += _stats4(euclid / gdist)
    diameter = int(dmat.max())
    global_head = None
    for d in RDF_LOCAL_BOUNDS:
        if d >= diameter:
            if global_head is None:
                mu = float(euclid.mean())
                rho = float(np.sqrt((euclid**2).mean()))
                global_head = [mu, rho, differential_entropy(euclid)]
            out += global_head
        else:
            local = euclid[gdist <= d]
            mu = float(local.mean())
            rho = float(np.sqrt((local**2).mean()))
            out += [mu, rho, differential_entropy(local)]

    graph_feats = [math.log(graph.n), math.log(graph.m)]
    return FeatureVector(np.asarray(out), np.asarray(graph_feats))


def format_feature_record(layout_id, fv):
    cols = [layout_id] + [repr(float(x)) for x in fv.combined]
    return "\t".join(cols)


def parse_feature_record(line):
    cols = line.rstrip("\n").split("\t")
    if len(cols) != 60:
        raise ParseError(f"expected 60 tab-separated columns, got {len(cols)}")
    vals = np.array([float(c) for c in cols[1:]], dtype=np.float64)
    return cols[0], FeatureVector(vals[:57], vals[57:])


def write_feature_file(path, records, header_comments=()):
    """records: iterable of (layout_id, FeatureVector)."""
    lines = [f"# {c}" for c in header_comments]
    lines += [format_feature_record(lid, fv) for lid, fv in records]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_feature_file(path):
    out = []
    with open(path) as fh:
        for ln, line in enumerate(fh, start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                out.append(parse_feature_record(line))
            except (ParseError, ValueError) as exc:
                raise ParseError(f"line {ln}: {exc}") from None
    return out
