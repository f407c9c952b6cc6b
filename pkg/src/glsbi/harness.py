"""Campaign orchestration: configuration, commands, persistence, manifests.

Stream policy: the root state is seeded from the config seed; every task
owns the stream jump^(base + local index)(root), where the base depends on
the command only (build-table 0, evaluate 2^21, diagnostics 2^22) and the
local index on the (grid point, replicate) position only.  Scheduling and
worker count therefore never affect results, and distinct commands under
one seed never share a stream.

All data files are written atomically (temp file + rename) with floats at
17 significant digits.  Each command leaves a manifest next to its outputs
that is itself a loadable config, so a run can be re-launched from it.
"""

from __future__ import annotations

import dataclasses
import hashlib
import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, diagnostics, distfit
from .diagnostics import PairSampleMode, StatisticCache, chi2_quantile
from .dynamics import (
    SimConfig,
    SpikeTrainRecord,
    sample_neurons,
    simulate,
    simulate_summaries,
)
from .errors import NumericError, ParameterError, TablePointFailure
from .graph import GraphParams, generate_er, remove_reciprocal
from .inference import (
    Observation,
    confidence_interval,
    estimate_p,
    optimal_reconstruction_mae,
    optimal_reconstruction_se,
)
from .rng import RngState, advance_jumps, jump, seed_from_u64
from .stats import (
    EXCL_DEGENERATE,
    EXCL_INSUFFICIENT,
    IsiSample,
    StatisticKind,
    compute_statistic,
    gamma_moments,
    statistics_from_summaries,
)

# command bases of the stream-index space; gaps outsize any realistic task count
STREAM_BASE = {"build-table": 0, "evaluate": 1 << 21, "diagnostics": 1 << 22}


@dataclass
class CampaignConfig:
    # network model
    n: int = 200
    w: float = 0.01
    v0: float = 0.01
    T: int = 100_000
    # table protocol
    K: int = 20
    grid_start: float = 0.005
    grid_step: float = 0.002
    grid_count: int = 21
    bins: int = 0  # 0 selects the Freedman-Diaconis default
    # evaluation protocol
    eval_start: float = 0.010
    eval_step: float = 0.003
    eval_count: int = 10
    s: int = 10
    n_estimations: int = 200  # per graph replicate
    graphs_per_truth: int = 1
    level: float = 0.95
    remove_reciprocal: bool = False
    # statistic / estimator variant
    kind: str = "spikefreq"
    estimator: str = "gaussian"
    # diagnostics
    diag_points: str = "0.012"
    diag_pairs: int = 2000
    diag_vectors: int = 500
    # execution
    seed: int = 1
    workers: int = 1
    out: str = "run"

    def __post_init__(self) -> None:
        for name in ("n", "T", "K", "s", "n_estimations", "graphs_per_truth", "workers"):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be positive")
        if self.kind not in ("spikefreq", "alpha"):
            raise ParameterError(f"kind must be spikefreq or alpha, got {self.kind!r}")
        if self.estimator not in ("gaussian", "histogram"):
            raise ParameterError(
                f"estimator must be gaussian or histogram, got {self.estimator!r}"
            )
        if not 0 <= self.seed <= (1 << 64) - 1:
            raise ParameterError("seed must be a 64-bit unsigned integer")

    @property
    def grid(self) -> np.ndarray:
        return self.grid_start + self.grid_step * np.arange(self.grid_count)

    @property
    def eval_grid(self) -> np.ndarray:
        return self.eval_start + self.eval_step * np.arange(self.eval_count)

    @property
    def statistic_kind(self) -> StatisticKind:
        return StatisticKind.from_label(self.kind)

    @property
    def sim_config(self) -> SimConfig:
        return SimConfig(T=self.T, v0=self.v0)

    def graph_params(self, p: float) -> GraphParams:
        return GraphParams(n=self.n, p=p, w=self.w)

    def root_state(self, command: str) -> RngState:
        return advance_jumps(seed_from_u64(self.seed), STREAM_BASE[command])

    def diag_p_values(self) -> list[float]:
        try:
            values = [float(v) for v in self.diag_points.split(",") if v.strip()]
        except ValueError as exc:
            raise ParameterError(f"bad diag_points: {self.diag_points!r}") from exc
        if not values:
            raise ParameterError("diag_points is empty")
        return values


_BOOL_WORDS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def load_config(path, overrides: dict | None = None) -> CampaignConfig:
    """Flat key=value file; `#` comments; manifest_* keys ignored; CLI overrides win."""
    raw: dict[str, str] = {}
    if path is not None:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, eq, value = line.partition("=")
                if not eq:
                    raise ParameterError(f"{path}:{lineno}: expected key=value")
                raw[key.strip()] = value.strip()
    merged = {k: v for k, v in raw.items() if not k.startswith("manifest_")}
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    fields = {f.name: f for f in dataclasses.fields(CampaignConfig)}
    kwargs = {}
    for key, value in merged.items():
        if key not in fields:
            raise ParameterError(f"unknown config key {key!r}")
        ftype = fields[key].type
        try:
            if ftype == "bool":
                if isinstance(value, bool):
                    kwargs[key] = value
                else:
                    kwargs[key] = _BOOL_WORDS[str(value).lower()]
            elif ftype == "int":
                kwargs[key] = int(value)
            elif ftype == "float":
                kwargs[key] = float(value)
            else:
                kwargs[key] = str(value)
        except (KeyError, ValueError) as exc:
            raise ParameterError(f"bad value for {key}: {value!r}") from exc
    return CampaignConfig(**kwargs)


def config_lines(cfg: CampaignConfig) -> list[str]:
    lines = []
    for f in dataclasses.fields(CampaignConfig):
        value = getattr(cfg, f.name)
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = f"{value:.17g}"
        lines.append(f"{f.name} = {value}")
    return lines


def atomic_write(path, text: str) -> None:
    """Write-temp-then-rename so partially written files are never observed."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    atomic_write(path, "\n".join(lines) + "\n")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(cfg: CampaignConfig, command: str, out_dir, outputs: list, started: float, notes: list[str] | None = None) -> str:
    lines = config_lines(cfg)
    lines.append(f"manifest_command = {command}")
    lines.append(f"manifest_software_version = glsbi {__version__}")
    lines.append(f"manifest_table_format_version = {distfit.TABLE_FORMAT_VERSION}")
    lines.append(f"manifest_stream_base = {STREAM_BASE.get(command, 0)}")
    lines.append(f"manifest_started = {time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime(started))}")
    lines.append(f"manifest_finished = {time.strftime('%Y-%m-%dT%H:%M:%SZ', time.gmtime())}")
    for path in outputs:
        lines.append(f"manifest_output = {os.path.basename(os.fspath(path))} sha256:{_sha256(path)}")
    for note in notes or []:
        lines.append(f"manifest_note = {note}")
    path = os.path.join(os.fspath(out_dir), f"manifest_{command.replace('-', '_')}.txt")
    atomic_write(path, "\n".join(lines) + "\n")
    return path


def write_spike_dump(record: SpikeTrainRecord, path) -> None:
    """`# T: <horizon>` header then one `neuron_id: t1 t2 ...` line per neuron."""
    lines = [f"# T: {record.T}"]
    for i in record.neurons:
        times = " ".join(str(int(t)) for t in record.spike_times(i))
        lines.append(f"{i}: {times}")
    atomic_write(path, "\n".join(lines) + "\n")


def read_spike_dump(path, T: int | None = None) -> SpikeTrainRecord:
    trains: dict[int, np.ndarray] = {}
    horizon = T
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                if key.strip() == "T":
                    horizon = int(value.strip())
                continue
            name, _, rest = line.partition(":")
            trains[int(name)] = np.array([int(t) for t in rest.split()], dtype=np.int64)
    if horizon is None:
        raise ParameterError(f"{path}: no '# T:' header and no horizon given")
    return SpikeTrainRecord(trains, horizon)


# ---------------------------------------------------------------------------
# commands


def cmd_build_table(cfg: CampaignConfig) -> str:
    """Build the sampling-distribution table over the config grid."""
    started = time.time()
    out_dir = _ensure_out(cfg)
    root = cfg.root_state("build-table")
    try:
        table = distfit.build_table(
            kind=cfg.statistic_kind,
            grid=cfg.grid,
            K=cfg.K,
            params_template=cfg.graph_params(cfg.grid[0]),
            sim=cfg.sim_config,
            rng=root,
            workers=cfg.workers,
            bins=cfg.bins if cfg.bins > 0 else None,
            seed=cfg.seed,
        )
    except TablePointFailure as exc:
        notes = [f"failed grid point p={p:g}: {why}" for p, why in exc.failures]
        write_manifest(cfg, "build-table", out_dir, [], started, notes=notes)
        raise
    path = os.path.join(out_dir, f"table_{cfg.kind}.csv")
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    os.close(fd)
    try:
        distfit.write_table(table, tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    n_tasks = cfg.grid_count * cfg.K
    write_manifest(
        cfg,
        "build-table",
        out_dir,
        [path],
        started,
        notes=[f"task streams: jump^(base+i)(root), i in [0, {n_tasks})"],
    )
    return path


def _ensure_out(cfg_or_dir) -> str:
    out = cfg_or_dir.out if isinstance(cfg_or_dir, CampaignConfig) else cfg_or_dir
    os.makedirs(out, exist_ok=True)
    return out


def _draw_valid_observation(values, valid, n, s, st, max_retries=100):
    """Sample s neurons whose statistic is computable; redraw whole samples."""
    for _ in range(max_retries):
        sample, st = sample_neurons(n, s, st)
        if valid[sample].all():
            return values[sample], st
    raise NumericError(f"no fully computable sample of {s} trains in {max_retries} draws")


def evaluate_truth_point(cfg: CampaignConfig, table, p_true: float, st: RngState):
    """One evaluation task: fresh graph, one simulation, n_estimations estimates."""
    g, st = generate_er(cfg.graph_params(p_true), st)
    if cfg.remove_reciprocal:
        g, st = remove_reciprocal(g, st)
    summaries, st = simulate_summaries(g, cfg.sim_config, st)
    values, valid, _ = statistics_from_summaries(cfg.statistic_kind, summaries)

    estimates = []
    for _ in range(cfg.n_estimations):
        obs_values, st = _draw_valid_observation(values, valid, cfg.n, cfg.s, st)
        obs = Observation(cfg.statistic_kind, obs_values)
        est = estimate_p(table, obs, cfg.estimator)
        lo, hi, clipped = confidence_interval(
            table, obs, cfg.estimator, cfg.level, estimate=est
        )
        estimates.append(est.with_ci(lo, hi, cfg.level, clipped))
    return estimates


def cmd_evaluate(cfg: CampaignConfig, table_path) -> tuple[str, str]:
    """Estimation sweep over the eval grid against an existing table."""
    started = time.time()
    out_dir = _ensure_out(cfg)
    table = distfit.read_table(table_path)
    if table.kind is not cfg.statistic_kind:
        raise ParameterError(
            f"table kind {table.kind.value} does not match config kind {cfg.kind}"
        )
    root = cfg.root_state("evaluate")
    variant = f"{cfg.kind}_{cfg.estimator}"

    est_rows = []
    summary_rows = []
    stream = root
    task_index = 0
    for j, p_true in enumerate(cfg.eval_grid):
        estimates = []
        for _ in range(cfg.graphs_per_truth):
            if task_index > 0:
                stream = jump(stream)
            task_index += 1
            estimates.extend(evaluate_truth_point(cfg, table, float(p_true), stream))
        p_target = (
            p_true - p_true * p_true / 2.0 if cfg.remove_reciprocal else p_true
        )
        p_hats = np.array([e.p_hat for e in estimates])
        covered = np.array(
            [e.ci[0] <= p_target <= e.ci[1] for e in estimates], dtype=bool
        )
        for e in estimates:
            est_rows.append(
                [
                    p_true,
                    variant,
                    cfg.s,
                    e.p_tilde,
                    e.p_hat,
                    e.ci[0],
                    e.ci[1],
                    ";".join(e.flags),
                ]
            )
        rel_mae = float(np.mean(np.abs(p_hats - p_target)) / p_target)
        rel_se = float(np.std(p_hats, ddof=1) / p_target) if len(p_hats) > 1 else 0.0
        summary_rows.append(
            [
                p_true,
                p_target,
                variant,
                cfg.s,
                len(estimates),
                rel_mae,
                rel_se,
                cfg.level,
                float(1.0 - covered.mean()),
            ]
        )

    est_path = os.path.join(out_dir, "estimates.csv")
    write_csv(
        est_path,
        ["p_true", "variant", "s", "p_tilde", "p_hat", "ci_lo", "ci_hi", "flags"],
        est_rows,
    )
    summary_path = os.path.join(out_dir, "summary.csv")
    write_csv(
        summary_path,
        [
            "p_true",
            "p_target",
            "variant",
            "s",
            "n_estimations",
            "rel_mae",
            "rel_se",
            "ci_level",
            "ci_noncoverage",
        ],
        summary_rows,
    )
    write_manifest(
        cfg,
        "evaluate",
        out_dir,
        [est_path, summary_path],
        started,
        notes=[f"task streams: jump^(base+i)(root), i in [0, {task_index})"],
    )
    return est_path, summary_path


def cmd_baseline(cfg: CampaignConfig, s_list: list[int] | None = None) -> str:
    """Tabulate the analytic reconstruction error floor over the eval grid."""
    started = time.time()
    out_dir = _ensure_out(cfg)
    s_values = sorted(s_list) if s_list else [cfg.s]
    rows = []
    for s in s_values:
        if s < 2:
            raise ParameterError(f"baseline needs s >= 2, got {s}")
        for p in cfg.eval_grid:
            p = float(p)
            rows.append(
                [s, p, optimal_reconstruction_mae(s, p), optimal_reconstruction_se(s, p)]
            )
    path = os.path.join(out_dir, "baseline.csv")
    write_csv(path, ["s", "p", "optimal_mae", "optimal_se"], rows)
    write_manifest(cfg, "baseline", out_dir, [path], started)
    return path


def cmd_estimate(
    cfg: CampaignConfig,
    table_path,
    spikes_path=None,
    values_path=None,
    horizon: int | None = None,
) -> dict:
    """Estimate p for one observation file; returns a result dict."""
    started = time.time()
    table = distfit.read_table(table_path)
    kind = table.kind
    if values_path is not None:
        with open(values_path) as fh:
            values = [float(line) for line in fh if line.strip()]
    elif spikes_path is not None:
        record = read_spike_dump(spikes_path, T=horizon)
        values = [
            compute_statistic(kind, record.spike_times(i), record.T)
            for i in record.neurons
        ]
    else:
        raise ParameterError("estimate needs a spike dump or a values file")
    obs = Observation(kind, np.array(values))
    est = estimate_p(table, obs, cfg.estimator)
    lo, hi, clipped = confidence_interval(
        table, obs, cfg.estimator, cfg.level, estimate=est
    )
    est = est.with_ci(lo, hi, cfg.level, clipped)

    out_dir = _ensure_out(cfg)
    path = os.path.join(out_dir, "estimate.csv")
    write_csv(
        path,
        ["variant", "s", "p_tilde", "p_hat", "ci_lo", "ci_hi", "flags"],
        [
            [
                f"{kind.value}_{cfg.estimator}",
                obs.s,
                est.p_tilde,
                est.p_hat,
                lo,
                hi,
                ";".join(est.flags),
            ]
        ],
    )
    write_manifest(cfg, "estimate", out_dir, [path], started)
    return {
        "kind": kind.value,
        "estimator": cfg.estimator,
        "s": obs.s,
        "p_tilde": est.p_tilde,
        "p_hat": est.p_hat,
        "ci": (lo, hi, cfg.level),
        "flags": est.flags,
        "path": path,
    }


def cmd_diagnostics(cfg: CampaignConfig, table_path=None, dump_spikes: bool = False) -> list[str]:
    """Independence/Gaussianity diagnostics datasets at the configured p values."""
    started = time.time()
    out_dir = _ensure_out(cfg)
    root = cfg.root_state("diagnostics")
    p_values = cfg.diag_p_values()
    table = distfit.read_table(table_path) if table_path else None

    corr_rows = []
    pair_rows = []
    maha_rows = []
    maha_qq_rows = []
    dist_rows = []
    dev_qq_rows = []
    stat_rows = []
    gamma_rows = []
    isi_rows = []
    outputs = []

    stream = root
    for j, p in enumerate(p_values):
        if j > 0:
            stream = jump(stream)
        st = stream
        g, st = generate_er(cfg.graph_params(p), st)
        record, st = simulate(g, SimConfig(T=cfg.T, v0=cfg.v0, record_set="all"), st)
        if dump_spikes:
            spath = os.path.join(out_dir, f"spikes_p{p:g}.txt")
            write_spike_dump(record, spath)
            outputs.append(spath)

        caches = {k: StatisticCache(record, k) for k in StatisticKind}

        # per-neuron statistic dump for both kinds
        for kind in StatisticKind:
            for i in range(g.n):
                value = caches[kind].value(i)
                if value is None:
                    stat_rows.append([p, 0, i, kind.value, "NA", _exclusion_reason(record, i)])
                else:
                    stat_rows.append([p, 0, i, kind.value, value, ""])

        # pairwise correlations under both sampling modes
        for kind in StatisticKind:
            for mode in PairSampleMode:
                pairs = []
                for _ in range(cfg.diag_pairs):
                    pair, st = diagnostics.sample_statistic_pair(
                        g, caches[kind], mode, st
                    )
                    pairs.append(pair)
                pairs = np.array(pairs)
                for x, y in pairs:
                    pair_rows.append([p, mode.value, kind.value, x, y])
                corr_rows.append(
                    [p, mode.value, kind.value, diagnostics.correlation(pairs)]
                )

        # joint Gaussianity: squared Mahalanobis distances of s-dim stat vectors
        kind = cfg.statistic_kind
        cache = caches[kind]
        vectors = []
        for _ in range(cfg.diag_vectors):
            vec, st = _draw_stat_vector(g.n, cfg.s, cache, st)
            vectors.append(vec)
        d2 = diagnostics.mahalanobis_sq(np.array(vectors))
        for value in d2:
            maha_rows.append([p, value])
        qq = diagnostics.qq_data(d2, lambda q: chi2_quantile(q, cfg.s))
        for eq, tq in zip(qq.empirical, qq.theoretical):
            maha_qq_rows.append([p, eq, tq])

        # distance of the pooled statistic sample to its Gaussian fit
        for kind2 in StatisticKind:
            values = np.array(
                [v for i in range(g.n) if (v := caches[kind2].value(i)) is not None]
            )
            if len(values) >= 2 and np.var(values) > 0:
                fit = distfit.fit_gaussian(values)
                dist_rows.append(
                    [
                        p,
                        kind2.value,
                        distfit.tv_distance(values, fit, distfit.default_bin_count(values)),
                        distfit.wasserstein_distance(values, fit),
                    ]
                )

        # Gamma moment scatter and the ISI histogram of the busiest neuron
        alpha_cache = caches[StatisticKind.GAMMA_ALPHA]
        busiest = max(range(g.n), key=lambda i: len(record.spike_times(i)))
        for i in range(g.n):
            if alpha_cache.value(i) is None:
                continue
            isis = np.diff(record.spike_times(i))
            gm = gamma_moments(IsiSample(isis))
            gamma_rows.append([p, 0, i, gm.alpha, gm.beta])
        for interval in np.diff(record.spike_times(busiest)):
            isi_rows.append([p, busiest, int(interval)])

        # deviance against the chi-squared(1) law, when a table is available
        if table is not None and table.kind is kind:
            summaries_values = np.array(
                [
                    v if (v := cache.value(i)) is not None else np.nan
                    for i in range(g.n)
                ]
            )
            valid = ~np.isnan(summaries_values)
            deviances = []
            for _ in range(cfg.n_estimations):
                obs_values, st = _draw_valid_observation(
                    summaries_values, valid, g.n, cfg.s, st
                )
                obs = Observation(kind, obs_values)
                est = estimate_p(table, obs, cfg.estimator)
                grid_ll = est.loglik
                ll_hat = float(np.interp(est.p_hat, grid_ll[:, 0], grid_ll[:, 1]))
                ll_true = float(np.interp(p, grid_ll[:, 0], grid_ll[:, 1]))
                deviances.append(2.0 * (ll_hat - ll_true))
            qq = diagnostics.qq_data(
                np.array(deviances), lambda q: chi2_quantile(q, 1)
            )
            for eq, tq in zip(qq.empirical, qq.theoretical):
                dev_qq_rows.append([p, eq, tq])

    files = [
        ("correlations.csv", ["p", "mode", "kind", "r"], corr_rows),
        ("pairs.csv", ["p", "mode", "kind", "x", "y"], pair_rows),
        ("mahalanobis.csv", ["p", "d2"], maha_rows),
        ("mahalanobis_qq.csv", ["p", "empirical_q", "theoretical_q"], maha_qq_rows),
        ("gauss_distance.csv", ["p", "kind", "tv", "wasserstein"], dist_rows),
        ("statistics.csv", ["p", "graph_id", "neuron_id", "kind", "value", "excluded_reason"], stat_rows),
        ("gamma_fits.csv", ["p", "graph_id", "neuron_id", "alpha", "beta"], gamma_rows),
        ("isis.csv", ["p", "neuron_id", "interval"], isi_rows),
    ]
    if dev_qq_rows:
        files.append(("deviance_qq.csv", ["p", "empirical_q", "theoretical_q"], dev_qq_rows))
    for name, header, rows in files:
        path = os.path.join(out_dir, name)
        write_csv(path, header, rows)
        outputs.append(path)
    write_manifest(
        cfg,
        "diagnostics",
        out_dir,
        outputs,
        started,
        notes=[f"task streams: jump^(base+i)(root), i in [0, {len(p_values)})"],
    )
    return outputs


def _exclusion_reason(record: SpikeTrainRecord, i: int) -> str:
    times = record.spike_times(i)
    if len(times) < 3:
        return EXCL_INSUFFICIENT
    return EXCL_DEGENERATE


def _draw_stat_vector(n, s, cache, st, max_retries=100):
    for _ in range(max_retries):
        sample, st = sample_neurons(n, s, st)
        values = [cache.value(int(i)) for i in sample]
        if all(v is not None for v in values):
            return np.array(values), st
    raise NumericError(f"no computable statistic vector found in {max_retries} draws")
