"""Figure renderers for glsbi run directories.

Each figure family is a function taking input paths and an output path;
`FIGURE_FAMILIES` maps family names to (renderer, expected input file
names) so the driver can enumerate what a run directory supports.
Rendering is deterministic: fixed style, headless Agg backend, no
timestamps in the image content.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import TableData, floats, read_csv, read_table

plt.rcParams.update(
    {
        "figure.dpi": 110,
        "savefig.dpi": 110,
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "lines.markersize": 3.5,
    }
)

_MODE_COLORS = {"random": "tab:blue", "post_synaptic_relation": "tab:orange"}


@dataclass
class FigureSpec:
    family: str
    inputs: list[str]
    output: str
    options: dict = field(default_factory=dict)


def _finish(fig, output):
    fig.savefig(output, format="png")
    plt.close(fig)
    return output


def _no_data(ax):
    ax.annotate(
        "no data",
        xy=(0.5, 0.5),
        xycoords="axes fraction",
        ha="center",
        va="center",
        fontsize=14,
        color="gray",
    )


def render_error_curves(inputs, output, **_):
    """Relative MAE and SE of the estimate against the truth p.

    First input is the evaluation summary; an optional second input is the
    analytic reconstruction baseline to overlay.
    """
    rows = read_csv(inputs[0], ["p_true", "variant", "rel_mae", "rel_se"])
    baseline = None
    if len(inputs) > 1:
        baseline = read_csv(inputs[1], ["s", "p", "optimal_mae", "optimal_se"])
    fig, (ax_mae, ax_se) = plt.subplots(1, 2, figsize=(9, 3.6))
    if not rows:
        _no_data(ax_mae)
        _no_data(ax_se)
    variants = sorted({r["variant"] for r in rows})
    for variant in variants:
        sub = [r for r in rows if r["variant"] == variant]
        p = floats(sub, "p_true")
        ax_mae.plot(p, [100 * v for v in floats(sub, "rel_mae")], "o-", label=variant)
        ax_se.plot(p, [100 * v for v in floats(sub, "rel_se")], "o-", label=variant)
    if baseline:
        for s in sorted({int(r["s"]) for r in baseline}):
            sub = [r for r in baseline if int(r["s"]) == s]
            p = floats(sub, "p")
            mae = [100 * m / q for m, q in zip(floats(sub, "optimal_mae"), p)]
            se = [100 * v / q for v, q in zip(floats(sub, "optimal_se"), p)]
            ax_mae.plot(p, mae, "k--", label=f"optimal reconstruction s={s}")
            ax_se.plot(p, se, "k--", label=f"optimal reconstruction s={s}")
    for ax, title in ((ax_mae, "relative mean absolute error"), (ax_se, "relative standard error")):
        ax.set_xlabel("connection probability p")
        ax.set_ylabel(f"{title} (%)")
        if rows:
            ax.legend(fontsize=7)
    fig.tight_layout()
    return _finish(fig, output)


def render_table_distributions(inputs, output, max_panels: int = 12, **_):
    """Histogram of the statistic with its Gaussian fit, one panel per p."""
    table: TableData = read_table(inputs[0])
    points = table.points
    if len(points) > max_panels:
        idx = np.linspace(0, len(points) - 1, max_panels).round().astype(int)
        points = [points[i] for i in sorted(set(idx))]
    ncols = 4
    nrows = max(1, math.ceil(len(points) / ncols))
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(3.0 * ncols, 2.4 * nrows), squeeze=False
    )
    for ax in axes.flat:
        ax.set_axis_off()
    if not points:
        axes[0][0].set_axis_on()
        _no_data(axes[0][0])
    for ax, pt in zip(axes.flat, points):
        ax.set_axis_on()
        edges = np.array(pt.edges)
        ax.stairs(pt.densities, edges, fill=True, alpha=0.5)
        if pt.sigma > 0:
            x = np.linspace(edges[0], edges[-1], 200)
            pdf = np.exp(-0.5 * ((x - pt.mu) / pt.sigma) ** 2) / (
                pt.sigma * math.sqrt(2 * math.pi)
            )
            ax.plot(x, pdf, "r-", lw=1.2)
        ax.set_title(f"p = {pt.p:g} (m = {pt.m})", fontsize=8)
    fig.suptitle(f"sampling distributions of {table.kind} with Gaussian fits")
    fig.tight_layout()
    return _finish(fig, output)


def render_correlations(inputs, output, **_):
    """Pairwise statistic correlation against p, per mode and kind."""
    rows = read_csv(inputs[0], ["p", "mode", "kind", "r"])
    kinds = sorted({r["kind"] for r in rows})
    fig, axes = plt.subplots(1, max(len(kinds), 1), figsize=(4.5 * max(len(kinds), 1), 3.4), squeeze=False)
    if not rows:
        _no_data(axes[0][0])
    for ax, kind in zip(axes[0], kinds):
        for mode in sorted({r["mode"] for r in rows}):
            sub = [r for r in rows if r["kind"] == kind and r["mode"] == mode]
            sub.sort(key=lambda r: float(r["p"]))
            ax.plot(
                floats(sub, "p"),
                floats(sub, "r"),
                "o-",
                color=_MODE_COLORS.get(mode),
                label=mode,
            )
        ax.axhline(0.0, color="k", lw=0.8)
        ax.set_ylim(-1, 1)
        ax.set_xlabel("connection probability p")
        ax.set_ylabel("correlation coefficient")
        ax.set_title(kind)
        ax.legend(fontsize=7)
    fig.tight_layout()
    return _finish(fig, output)


def render_pairs(inputs, output, **_):
    """Joint scatter of statistic pairs, one panel per kind, colors per mode."""
    rows = read_csv(inputs[0], ["p", "mode", "kind", "x", "y"])
    kinds = sorted({r["kind"] for r in rows})
    fig, axes = plt.subplots(
        1, max(len(kinds), 1), figsize=(4.2 * max(len(kinds), 1), 3.8), squeeze=False
    )
    if not rows:
        _no_data(axes[0][0])
    for ax, kind in zip(axes[0], kinds):
        for mode in sorted({r["mode"] for r in rows}):
            sub = [r for r in rows if r["kind"] == kind and r["mode"] == mode]
            ax.plot(
                floats(sub, "x"),
                floats(sub, "y"),
                ".",
                alpha=0.35,
                color=_MODE_COLORS.get(mode),
                label=mode,
            )
        ax.set_xlabel("statistic of neuron i")
        ax.set_ylabel("statistic of neuron j")
        ax.set_title(kind)
        ax.legend(fontsize=7, markerscale=2)
    fig.tight_layout()
    return _finish(fig, output)


def render_qq(inputs, output, title: str = "Q-Q plot", **_):
    """Empirical vs theoretical quantiles with the identity diagonal."""
    rows = read_csv(inputs[0], ["p", "empirical_q", "theoretical_q"])
    fig, ax = plt.subplots(figsize=(4.6, 4.2))
    if not rows:
        _no_data(ax)
    p_values = sorted({r["p"] for r in rows}, key=float)
    for p in p_values:
        sub = [r for r in rows if r["p"] == p]
        ax.plot(
            floats(sub, "theoretical_q"),
            floats(sub, "empirical_q"),
            ".",
            label=f"p = {float(p):g}",
        )
    if rows:
        theo = floats(rows, "theoretical_q")
        lo, hi = min(theo), max(theo)
        ax.plot([lo, hi], [lo, hi], "k-", lw=1)
        ax.legend(fontsize=7, markerscale=2)
    ax.set_xlabel("theoretical quantile")
    ax.set_ylabel("empirical quantile")
    ax.set_title(title)
    fig.tight_layout()
    return _finish(fig, output)


def render_ci_coverage(inputs, output, **_):
    """Percentage of intervals missing the target, per truth p."""
    rows = read_csv(
        inputs[0], ["p_true", "variant", "ci_level", "ci_noncoverage"]
    )
    fig, ax = plt.subplots(figsize=(5.4, 3.4))
    if not rows:
        _no_data(ax)
    variants = sorted({r["variant"] for r in rows})
    width = 0.8 / max(len(variants), 1)
    for k, variant in enumerate(variants):
        sub = [r for r in rows if r["variant"] == variant]
        sub.sort(key=lambda r: float(r["p_true"]))
        p = np.array(floats(sub, "p_true"))
        miss = 100 * np.array(floats(sub, "ci_noncoverage"))
        step = np.min(np.diff(p)) if len(p) > 1 else 0.001
        ax.bar(p + (k - (len(variants) - 1) / 2) * width * step, miss,
               width=width * step, label=variant)
    if rows:
        nominal = 100 * (1.0 - float(rows[0]["ci_level"]))
        ax.axhline(nominal, color="k", ls="--", lw=1, label=f"nominal {nominal:g}%")
        ax.legend(fontsize=7)
    ax.set_xlabel("true connection probability p")
    ax.set_ylabel("intervals missing the target (%)")
    fig.tight_layout()
    return _finish(fig, output)


def render_gauss_distance(inputs, output, **_):
    """Total-variation and Wasserstein distance to the Gaussian fit vs p."""
    rows = read_csv(inputs[0], ["p", "kind", "tv", "wasserstein"])
    fig, (ax_tv, ax_w) = plt.subplots(1, 2, figsize=(8.6, 3.4))
    if not rows:
        _no_data(ax_tv)
        _no_data(ax_w)
    for kind in sorted({r["kind"] for r in rows}):
        sub = [r for r in rows if r["kind"] == kind]
        sub.sort(key=lambda r: float(r["p"]))
        ax_tv.plot(floats(sub, "p"), floats(sub, "tv"), "o-", label=kind)
        ax_w.plot(floats(sub, "p"), floats(sub, "wasserstein"), "o-", label=kind)
    ax_tv.set_ylabel("total variation distance")
    ax_w.set_ylabel("Wasserstein distance")
    for ax in (ax_tv, ax_w):
        ax.set_xlabel("connection probability p")
        if rows:
            ax.legend(fontsize=7)
    fig.tight_layout()
    return _finish(fig, output)


def render_isi_gamma(inputs, output, **_):
    """ISI histogram of the dumped neuron with its moment-fitted Gamma pdf.

    First input: isis.csv; second input: gamma_fits.csv (provides the alpha
    and beta of the matching neuron, no refitting here).
    """
    isi_rows = read_csv(inputs[0], ["p", "neuron_id", "interval"])
    fit_rows = read_csv(inputs[1], ["p", "neuron_id", "alpha", "beta"])
    p_values = sorted({r["p"] for r in isi_rows}, key=float)
    fig, axes = plt.subplots(
        1, max(len(p_values), 1), figsize=(4.4 * max(len(p_values), 1), 3.4), squeeze=False
    )
    if not isi_rows:
        _no_data(axes[0][0])
    for ax, p in zip(axes[0], p_values):
        sub = [r for r in isi_rows if r["p"] == p]
        neuron = sub[0]["neuron_id"]
        intervals = np.array([float(r["interval"]) for r in sub])
        kmax = int(intervals.max())
        edges = np.arange(0.5, kmax + 1.5)
        ax.hist(intervals, bins=edges, density=True, alpha=0.5)
        fit = [
            r
            for r in fit_rows
            if r["p"] == p and r["neuron_id"] == neuron
        ]
        if fit:
            alpha, beta = float(fit[0]["alpha"]), float(fit[0]["beta"])
            x = np.linspace(max(edges[0], 1e-9), edges[-1], 300)
            log_pdf = (
                alpha * math.log(beta)
                + (alpha - 1) * np.log(x)
                - beta * x
                - math.lgamma(alpha)
            )
            ax.plot(x, np.exp(log_pdf), "r-", lw=1.3, label=f"Gamma({alpha:.2f}, {beta:.2f})")
            ax.legend(fontsize=7)
        ax.set_xlabel("inter-spike interval (steps)")
        ax.set_ylabel("density")
        ax.set_title(f"p = {float(p):g}, neuron {neuron}", fontsize=8)
    fig.tight_layout()
    return _finish(fig, output)


def render_gamma_scatter(inputs, output, **_):
    """Moment-fitted Gamma rate against shape for every neuron, per p."""
    rows = read_csv(inputs[0], ["p", "neuron_id", "alpha", "beta"])
    fig, ax = plt.subplots(figsize=(4.8, 3.8))
    if not rows:
        _no_data(ax)
    for p in sorted({r["p"] for r in rows}, key=float):
        sub = [r for r in rows if r["p"] == p]
        ax.plot(
            floats(sub, "alpha"), floats(sub, "beta"), ".", alpha=0.4, label=f"p = {float(p):g}"
        )
    ax.set_xlabel("estimated shape alpha")
    ax.set_ylabel("estimated rate beta")
    if rows:
        ax.legend(fontsize=7, markerscale=2)
    fig.tight_layout()
    return _finish(fig, output)


# family -> (renderer, default input file names in a run directory)
FIGURE_FAMILIES = {
    "error_curves": (render_error_curves, ["summary.csv", "baseline.csv"]),
    "table_distributions": (render_table_distributions, ["table_*.csv"]),
    "correlations": (render_correlations, ["correlations.csv"]),
    "pairs": (render_pairs, ["pairs.csv"]),
    "mahalanobis_qq": (render_qq, ["mahalanobis_qq.csv"]),
    "deviance_qq": (render_qq, ["deviance_qq.csv"]),
    "ci_coverage": (render_ci_coverage, ["summary.csv"]),
    "gauss_distance": (render_gauss_distance, ["gauss_distance.csv"]),
    "isi_gamma": (render_isi_gamma, ["isis.csv", "gamma_fits.csv"]),
    "gamma_scatter": (render_gamma_scatter, ["gamma_fits.csv"]),
}


def render(spec: FigureSpec) -> str:
    """Render one FigureSpec; returns the output path."""
    if spec.family not in FIGURE_FAMILIES:
        raise ValueError(f"unknown figure family {spec.family!r}")
    renderer, _ = FIGURE_FAMILIES[spec.family]
    for path in spec.inputs:
        with open(path):
            pass
    return renderer(spec.inputs, spec.output, **spec.options)


def enumerate_specs(run_dir, out_dir) -> list[FigureSpec]:
    """FigureSpecs for every family whose inputs exist in run_dir."""
    import glob
    import os

    specs = []
    for family, (_, patterns) in FIGURE_FAMILIES.items():
        inputs = []
        complete = True
        for k, pattern in enumerate(patterns):
            matches = sorted(glob.glob(os.path.join(run_dir, pattern)))
            if matches:
                inputs.append(matches[0])
            elif family == "error_curves" and k > 0:
                continue  # baseline overlay is optional
            else:
                complete = False
                break
        if complete and inputs:
            specs.append(
                FigureSpec(
                    family=family,
                    inputs=inputs,
                    output=os.path.join(out_dir, f"{family}.png"),
                )
            )
    return specs
