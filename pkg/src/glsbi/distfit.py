"""Per-p sampling distributions of a spike-train statistic.

For every grid value of the connection probability, K graphs are generated
and simulated, the statistic of all n neurons is pooled (K*n samples minus
exclusions) and both a Gaussian and a histogram estimator are fitted.  The
inference layer picks one of the two at query time.

Densities are floored at EPS_FLOOR = 1e-30 outside the histogram support
and in empty bins, so that product likelihoods stay finite while preserving
the argmax ordering.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

from .dynamics import SimConfig, simulate_summaries
from .errors import DegenerateSample, ParameterError, TablePointFailure
from .graph import GraphParams, generate_er
from .rng import RngState, stream_states
from .stats import StatisticKind, statistics_from_summaries

EPS_FLOOR = 1e-30
LOG_EPS_FLOOR = math.log(EPS_FLOOR)

TABLE_FORMAT_VERSION = 1

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GaussianFit:
    mu: float
    sigma: float
    m: int

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise DegenerateSample(f"sigma must be positive, got {self.sigma}")
        if self.m < 2:
            raise DegenerateSample(f"need >= 2 samples, got {self.m}")


@dataclass(frozen=True)
class HistogramFit:
    edges: np.ndarray
    densities: np.ndarray
    m: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", np.asarray(self.edges, dtype=np.float64))
        object.__setattr__(
            self, "densities", np.asarray(self.densities, dtype=np.float64)
        )
        if len(self.edges) != len(self.densities) + 1:
            raise ParameterError("need B+1 edges for B densities")
        if np.any(np.diff(self.edges) <= 0):
            raise ParameterError("histogram edges must be strictly increasing")
        if np.any(self.densities < 0):
            raise ParameterError("densities must be non-negative")

    @property
    def bin_count(self) -> int:
        return len(self.densities)


def fit_gaussian(samples: np.ndarray) -> GaussianFit:
    """Sample mean and unbiased-variance Gaussian fit."""
    samples = np.asarray(samples, dtype=np.float64)
    if len(samples) < 2:
        raise DegenerateSample(f"need >= 2 samples, got {len(samples)}")
    var = float(np.var(samples, ddof=1))
    if var <= 0:
        raise DegenerateSample("zero sample variance")
    return GaussianFit(mu=float(np.mean(samples)), sigma=math.sqrt(var), m=len(samples))


def _bin_edges(samples: np.ndarray, bins: int) -> np.ndarray:
    """Equal-width edges over [min, max], top widened so the max falls inside.

    Degenerate samples (max == min) get a tiny symmetric interval around the
    common value; used by tv_distance, where a point mass is meaningful.
    A span too small for float64 to carve into `bins` distinct cells falls
    back to the same symmetric widening, putting the whole sample in one bin.
    """
    lo = float(np.min(samples))
    hi = float(np.max(samples))
    if hi > lo:
        hi = hi + 1e-9 * max(abs(hi), hi - lo)
        edges = np.linspace(lo, hi, bins + 1)
        widths = np.diff(edges)
        # all cells resolvable and narrow enough that densities stay finite
        if np.all(widths > 0) and math.isfinite(1.0 / float(widths.min())):
            return edges
    center = (lo + hi) / 2.0
    delta = 1e-9 * max(abs(center), 1.0)
    return np.linspace(center - delta, center + delta, bins + 1)


def default_bin_count(samples: np.ndarray) -> int:
    """Freedman-Diaconis rule, capped to [10, 200] bins."""
    samples = np.asarray(samples, dtype=np.float64)
    q75, q25 = np.percentile(samples, [75.0, 25.0])
    iqr = q75 - q25
    span = float(np.max(samples) - np.min(samples))
    if iqr <= 0 or span <= 0:
        return 10
    h = 2.0 * iqr / len(samples) ** (1.0 / 3.0)
    return int(np.clip(math.ceil(span / h), 10, 200))


def fit_histogram(samples: np.ndarray, bins: int) -> HistogramFit:
    """Equal-width histogram density estimator; integrates to 1."""
    samples = np.asarray(samples, dtype=np.float64)
    if len(samples) < 1:
        raise DegenerateSample("need >= 1 sample")
    if bins < 1:
        raise ParameterError(f"bins must be >= 1, got {bins}")
    if float(np.min(samples)) == float(np.max(samples)):
        raise DegenerateSample("all samples equal")
    edges = _bin_edges(samples, bins)
    counts, _ = np.histogram(samples, bins=edges)
    densities = counts / (len(samples) * np.diff(edges))
    return HistogramFit(edges=edges, densities=densities, m=len(samples))


def log_density(fit: GaussianFit | HistogramFit, x: float) -> float:
    """Log of the estimated density at x; floored at log(1e-30) off-support."""
    if math.isnan(x):
        raise ValueError("log_density is undefined for NaN")
    if isinstance(fit, GaussianFit):
        z = (x - fit.mu) / fit.sigma
        return -0.5 * z * z - math.log(fit.sigma) - _LOG_SQRT_2PI
    edges = fit.edges
    if x < edges[0] or x >= edges[-1]:
        return LOG_EPS_FLOOR
    b = int(np.searchsorted(edges, x, side="right")) - 1
    d = fit.densities[b]
    if d <= 0.0:
        return LOG_EPS_FLOOR
    return math.log(d)


def _gaussian_cdf(x: np.ndarray, fit: GaussianFit) -> np.ndarray:
    return ndtr((np.asarray(x, dtype=np.float64) - fit.mu) / fit.sigma)


def _histogram_cdf(x: np.ndarray, fit: HistogramFit) -> np.ndarray:
    """Piecewise-linear CDF of the histogram density at points x."""
    x = np.asarray(x, dtype=np.float64)
    widths = np.diff(fit.edges)
    cum = np.concatenate([[0.0], np.cumsum(fit.densities * widths)])
    xc = np.clip(x, fit.edges[0], fit.edges[-1])
    b = np.clip(np.searchsorted(fit.edges, xc, side="right") - 1, 0, fit.bin_count - 1)
    return cum[b] + fit.densities[b] * (xc - fit.edges[b])


def mass_in_intervals(
    fit: GaussianFit | HistogramFit, edges: np.ndarray
) -> np.ndarray:
    """Probability mass of the fit in each [edges[b], edges[b+1]) cell."""
    if isinstance(fit, GaussianFit):
        cdf = _gaussian_cdf(edges, fit)
    else:
        cdf = _histogram_cdf(edges, fit)
    return np.diff(cdf)


def tv_distance(
    samples: np.ndarray, fit: GaussianFit | HistogramFit, bins: int
) -> float:
    """Total variation between the binned empirical law and the fit.

    Both measures are restricted to the partition made of the `bins`
    equal-width cells over the sample range plus the complement cell, so the
    fit's off-range mass counts; the value is bin-dependent.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if len(samples) < 2:
        raise DegenerateSample("need >= 2 samples")
    edges = _bin_edges(samples, bins)
    counts, _ = np.histogram(samples, bins=edges)
    p_hat = counts / len(samples)
    q = mass_in_intervals(fit, edges)
    q_out = max(0.0, 1.0 - float(q.sum()))
    return 0.5 * (float(np.abs(p_hat - q).sum()) + q_out)


def wasserstein_distance(samples: np.ndarray, fit: GaussianFit) -> float:
    """W1 between the empirical law and the Gaussian, by quantile integration."""
    samples = np.sort(np.asarray(samples, dtype=np.float64))
    m = len(samples)
    if m < 2:
        raise DegenerateSample("need >= 2 samples")
    levels = (np.arange(1, m + 1) - 0.5) / m
    gq = fit.mu + fit.sigma * ndtri(levels)
    return float(np.mean(np.abs(samples - gq)))


@dataclass
class TablePoint:
    p: float
    m: int
    excluded: int
    gaussian: GaussianFit
    histogram: HistogramFit


@dataclass
class SamplingDistributionTable:
    kind: StatisticKind
    points: list[TablePoint]
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        grid = self.grid
        if len(grid) == 0:
            raise ParameterError("table must have at least one grid point")
        if np.any(np.diff(grid) <= 0):
            raise ParameterError("grid must be strictly ascending")

    @property
    def grid(self) -> np.ndarray:
        return np.array([pt.p for pt in self.points])

    def __len__(self) -> int:
        return len(self.points)

    def fit_at(self, index: int, estimator: str) -> GaussianFit | HistogramFit:
        if estimator == "gaussian":
            return self.points[index].gaussian
        if estimator == "histogram":
            return self.points[index].histogram
        raise ParameterError(f"unknown estimator {estimator!r}")


def _table_task(kind, params, sim, stream):
    g, st = generate_er(params, stream)
    summaries, _ = simulate_summaries(g, sim, st)
    values, valid, _ = statistics_from_summaries(kind, summaries)
    return values[valid], int((~valid).sum())


def build_table(
    kind: StatisticKind,
    grid,
    K: int,
    params_template: GraphParams,
    sim: SimConfig,
    rng: RngState,
    workers: int = 1,
    bins: int | None = None,
    seed: int | None = None,
) -> SamplingDistributionTable:
    """Estimate the sampling distribution of the statistic at every grid p.

    Task (grid index gi, replicate k) owns the stream jump^(gi*K + k)(rng),
    so results are independent of scheduling and worker count.  Each task
    generates one graph and simulates it once; the K*n statistics per grid
    point (minus exclusions) feed both estimators.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if len(grid) == 0 or np.any(np.diff(grid) <= 0):
        raise ParameterError("grid must be nonempty and strictly ascending")
    if K < 1:
        raise ParameterError(f"K must be >= 1, got {K}")

    streams = stream_states(rng, len(grid) * K)
    tasks = []
    for gi, p in enumerate(grid):
        params = GraphParams(n=params_template.n, p=float(p), w=params_template.w)
        for k in range(K):
            tasks.append((kind, params, sim, streams[gi * K + k]))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: _table_task(*t), tasks))
    else:
        results = [_table_task(*t) for t in tasks]

    points: list[TablePoint] = []
    failures: list[tuple[float, str]] = []
    for gi, p in enumerate(grid):
        chunk = results[gi * K : (gi + 1) * K]
        pooled = np.concatenate([c[0] for c in chunk])
        excluded = sum(c[1] for c in chunk)
        if len(pooled) == 0:
            failures.append((float(p), "all samples excluded"))
            continue
        try:
            gauss = fit_gaussian(pooled)
            hist = fit_histogram(
                pooled, bins if bins is not None else default_bin_count(pooled)
            )
        except DegenerateSample as exc:
            failures.append((float(p), str(exc)))
            continue
        points.append(
            TablePoint(
                p=float(p),
                m=len(pooled),
                excluded=excluded,
                gaussian=gauss,
                histogram=hist,
            )
        )

    if failures:
        err = TablePointFailure(
            "; ".join(f"p={p:g}: {why}" for p, why in failures)
        )
        err.failures = failures
        raise err

    meta = {
        "n": params_template.n,
        "T": sim.T,
        "K": K,
        "w": params_template.w,
        "v0": sim.v0,
        "seed": seed if seed is not None else "",
    }
    return SamplingDistributionTable(kind=kind, points=points, meta=meta)


def write_table(table: SamplingDistributionTable, path) -> None:
    """Versioned text format; floats at 17 significant digits round-trip exactly."""
    lines = [f"# glsbi-table-version: {TABLE_FORMAT_VERSION}"]
    lines.append(f"# kind: {table.kind.value}")
    for key in ("n", "T", "K", "w", "v0", "seed"):
        lines.append(f"# {key}: {_fmt(table.meta.get(key, ''))}")
    for pt in table.points:
        fields = [
            _fmt(pt.p),
            str(pt.m),
            str(pt.excluded),
            _fmt(pt.gaussian.mu),
            _fmt(pt.gaussian.sigma),
            str(pt.histogram.bin_count),
        ]
        fields.extend(_fmt(e) for e in pt.histogram.edges)
        fields.extend(_fmt(d) for d in pt.histogram.densities)
        lines.append(",".join(fields))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_table(path) -> SamplingDistributionTable:
    meta: dict = {}
    points: list[TablePoint] = []
    kind: StatisticKind | None = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                key, value = key.strip(), value.strip()
                if key == "glsbi-table-version":
                    if int(value) != TABLE_FORMAT_VERSION:
                        raise ParameterError(f"unsupported table version {value}")
                elif key == "kind":
                    kind = StatisticKind.from_label(value)
                elif key in ("n", "T", "K"):
                    meta[key] = int(value) if value else ""
                elif key in ("w", "v0"):
                    meta[key] = float(value) if value else ""
                elif key == "seed":
                    meta[key] = int(value) if value else ""
                continue
            parts = line.split(",")
            p, m, excluded = float(parts[0]), int(parts[1]), int(parts[2])
            mu, sigma, bcount = float(parts[3]), float(parts[4]), int(parts[5])
            edges = np.array([float(v) for v in parts[6 : 7 + bcount]])
            dens = np.array([float(v) for v in parts[7 + bcount : 7 + 2 * bcount]])
            points.append(
                TablePoint(
                    p=p,
                    m=m,
                    excluded=excluded,
                    gaussian=GaussianFit(mu=mu, sigma=sigma, m=m),
                    histogram=HistogramFit(edges=edges, densities=dens, m=m),
                )
            )
    if kind is None:
        raise ParameterError(f"{path}: missing '# kind:' header")
    return SamplingDistributionTable(kind=kind, points=points, meta=meta)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)
