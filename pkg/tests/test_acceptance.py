"""Acceptance suite: one test per criterion, printed as PASS/FAIL lines.

The end-to-end criteria build a desk-scale sampling-distribution table
(21 grid points, n=200, T=1e5, K=20, ~5 minutes) through the public harness
commands; everything downstream of the module fixtures is deterministic
given the seeds fixed here.  Run with `pytest tests/test_acceptance.py -v -s`
to see the per-criterion lines.
"""

import csv
import hashlib
import math
import os

import numpy as np
import pytest
from scipy import stats as spstats

from glsbi import _kernels
from glsbi.dynamics import NetworkState, SimConfig, simulate_summaries, step
from glsbi.graph import GraphParams, edge_count, generate_er
from glsbi.harness import CampaignConfig, cmd_build_table, cmd_evaluate
from glsbi.inference import (
    optimal_reconstruction_mae,
    optimal_reconstruction_se,
    quadratic_peak,
)
from glsbi.rng import next_u64, seed_from_u64, state_from_array, state_to_array

import oracles
from test_dynamics import merge_rare_cells

DESK_SEED = 20250808


def report(criterion: str, passed: bool, detail: str) -> bool:
    print(f"ACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} - {detail}", flush=True)
    return passed


@pytest.fixture(scope="module")
def desk_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk")
    cfg = CampaignConfig(
        n=200,
        T=100_000,
        K=20,
        grid_start=0.005,
        grid_step=0.002,
        grid_count=21,
        eval_start=0.010,
        eval_step=0.003,
        eval_count=10,
        s=10,
        n_estimations=200,
        kind="spikefreq",
        estimator="gaussian",
        seed=DESK_SEED,
        out=str(out),
    )
    table_path = cmd_build_table(cfg)
    est_path, summary_path = cmd_evaluate(cfg, table_path)
    return cfg, table_path, est_path, summary_path


@pytest.fixture(scope="module")
def reciprocal_run(tmp_path_factory):
    # table grid shifted to bracket p' = 0.04875; 200 estimations pooled
    # over 10 graph realizations at truth p = 0.05
    out = tmp_path_factory.mktemp("rrc")
    cfg = CampaignConfig(
        n=200,
        T=100_000,
        K=20,
        grid_start=0.035,
        grid_step=0.002,
        grid_count=11,
        eval_start=0.05,
        eval_step=0.001,
        eval_count=1,
        s=10,
        n_estimations=20,
        graphs_per_truth=10,
        kind="spikefreq",
        estimator="gaussian",
        remove_reciprocal=True,
        seed=DESK_SEED,
        out=str(out),
    )
    table_path = cmd_build_table(cfg)
    est_path, summary_path = cmd_evaluate(cfg, table_path)
    return cfg, est_path


def test_acceptance_01_prng_bit_exactness(xoshiro_vectors):
    ok = True
    for seed, expected in xoshiro_vectors.items():
        state = seed_from_u64(seed)
        got = []
        for _ in range(len(expected)):
            v, state = next_u64(state)
            got.append(v)
        ok &= got == expected
        arr = state_to_array(seed_from_u64(seed))
        out = np.empty(len(expected), dtype=np.uint64)
        _kernels.fill_u64(arr, out)
        ok &= [int(v) for v in out] == expected
    assert report(
        "01 prng-bit-exactness",
        ok,
        f"{len(xoshiro_vectors)} seeds x 1000 outputs, pure and kernel paths",
    )


def test_acceptance_02_graph_moments():
    st = seed_from_u64(DESK_SEED)
    params = GraphParams(1000, 0.01, 0.01)
    n_graphs = 200
    counts = np.empty(n_graphs)
    degrees = []
    for g_idx in range(n_graphs):
        g, st = generate_er(params, st)
        counts[g_idx] = edge_count(g)
        degrees.append(np.diff(g.pre_indptr))
    sigma = math.sqrt(9990 * 0.99)
    mean_dev = abs(counts.mean() - 9990)
    tol = 4 * sigma / math.sqrt(n_graphs)
    ok_mean = mean_dev < tol

    pooled = np.concatenate(degrees)
    kmax = int(pooled.max())
    pmf = spstats.binom.pmf(np.arange(kmax + 1), 999, 0.01)
    observed = np.bincount(pooled, minlength=kmax + 1).astype(float)
    expected = np.append(pmf, 1.0 - pmf.sum()) * len(pooled)
    observed = np.append(observed, 0.0)
    obs, exp = merge_rare_cells(observed, expected)
    _, pvalue = spstats.chisquare(obs, exp * obs.sum() / exp.sum())
    ok_chi2 = pvalue > 0.01
    assert report(
        "02 graph-moments",
        ok_mean and ok_chi2,
        f"mean edges dev {mean_dev:.2f} < {tol:.2f}; degree chi2 p={pvalue:.4f} > 0.01",
    )


def test_acceptance_03_dynamics_oracle():
    # exhaustive law of the 2-neuron mutual-edge network over T=3 steps
    law = oracles.enumerate_raster_probs([[1], [0]], w=0.01, v0=0.01, T=3)
    assert abs(sum(law.values()) - 1.0) < 1e-12
    post_indptr = np.array([0, 1, 2], dtype=np.int64)
    post_indices = np.array([1, 0], dtype=np.int64)
    reps = 1_000_000
    arr = state_to_array(seed_from_u64(DESK_SEED + 3))
    codes = _kernels.gl_raster_batch(
        arr, 2, 3, 0.01, 0.01, post_indptr, post_indices, reps
    )
    code_values = sorted(law)
    counts = np.bincount(codes, minlength=64).astype(float)
    observed = np.array([counts[c] for c in code_values])
    expected = np.array([law[c] * reps for c in code_values])
    obs, exp = merge_rare_cells(observed, expected)
    _, pvalue = spstats.chisquare(obs, exp * obs.sum() / exp.sum())
    assert report(
        "03 dynamics-oracle",
        pvalue > 0.001,
        f"raster chi2 over {len(obs)} cells, 1e6 replicates: p={pvalue:.4f} > 0.001",
    )


def test_acceptance_04_dynamics_invariants():
    rng = np.random.default_rng(404)
    st = seed_from_u64(DESK_SEED + 4)
    isolated_violations = 0
    # production path at desk scale: isolated neurons spike at most once
    for _ in range(100):
        n = int(rng.integers(120, 201))
        p = float(rng.uniform(0.005, 0.045))
        T = int(rng.integers(20_000, 50_001))
        g, st = generate_er(GraphParams(n, p, 0.01), st)
        summ, st = simulate_summaries(g, SimConfig(T=T), st)
        isolated = np.diff(g.pre_indptr) == 0
        isolated_violations += int((summ.spike_count[isolated] > 1).sum())
    # reference path: potentials stay non-negative and reset exactly
    potential_violations = 0
    for _ in range(100):
        n = int(rng.integers(20, 61))
        p = float(rng.uniform(0.01, 0.2))
        g, st = generate_er(GraphParams(n, p, 0.01), st)
        ns, rng_state = NetworkState(np.full(n, 0.01)), st
        for _ in range(400):
            ns, x, rng_state = step(ns, g, rng_state)
            potential_violations += int(np.any(ns.v < 0.0))
            potential_violations += int(np.any(ns.v[x] != 0.0))
        st = rng_state
    total = isolated_violations + potential_violations
    assert report(
        "04 dynamics-invariants",
        total == 0,
        f"{total} violations across 200 random simulations",
    )


def test_acceptance_05_reconstruction_baseline():
    ok_exact = True
    for s in (2, 3, 4, 5, 6):  # s(s-1) <= 30: exact enumeration
        for p in (0.01, 0.05, 0.123, 0.3, 0.5, 0.8, 0.99):
            closed = optimal_reconstruction_mae(s, p)
            brute = oracles.binomial_mae_enumeration(s, p)
            ok_exact &= abs(closed - brute) < 1e-12
            se_closed = optimal_reconstruction_se(s, p)
            se_brute = oracles.binomial_se_enumeration(s, p)
            ok_exact &= abs(se_closed - se_brute) < 1e-12
    ok_spot = optimal_reconstruction_mae(2, 0.5) == 0.25

    rng = np.random.default_rng(5)
    s, p = 10, 0.05
    m = s * (s - 1)
    draws = rng.binomial(m, p, size=1_000_000)
    abs_err = np.abs(draws / m - p)
    mc_mean = abs_err.mean()
    mc_se = abs_err.std(ddof=1) / math.sqrt(len(abs_err))
    ok_mc_mae = abs(optimal_reconstruction_mae(s, p) - mc_mean) < 3 * mc_se
    mc_sd = (draws / m).std(ddof=1)
    # MC error of a standard deviation: sd / sqrt(2(N-1))
    sd_se = mc_sd / math.sqrt(2 * (len(draws) - 1))
    ok_mc_se = abs(optimal_reconstruction_se(s, p) - mc_sd) < 3 * sd_se
    assert report(
        "05 lemma-reconstruction",
        ok_exact and ok_spot and ok_mc_mae and ok_mc_se,
        f"exact enum to 1e-12; s=2,p=0.5 -> 0.25; MC dev {abs(optimal_reconstruction_mae(s, p) - mc_mean):.2e} < {3 * mc_se:.2e}",
    )


def test_acceptance_06_quadratic_peak():
    rng = np.random.default_rng(6)
    worst = 0.0
    worst_affine = 0.0
    for _ in range(10_000):
        x2 = rng.uniform(-5, 5)
        x1 = x2 - rng.uniform(0.5, 2.0)
        x3 = x2 + rng.uniform(0.5, 2.0)
        y2 = rng.uniform(-10, 10)
        y1 = y2 - rng.uniform(0.5, 8.0)
        y3 = y2 - rng.uniform(0.5, 8.0)
        result = quadratic_peak(x1, y1, x2, y2, x3, y3)
        expected = oracles.quadratic_vertex_lsq([x1, x2, x3], [y1, y2, y3])
        worst = max(worst, abs(result.x - expected) / max(abs(expected), x3 - x1))
        a, b = rng.uniform(0.2, 5.0), rng.uniform(-20, 20)
        moved = quadratic_peak(x1, a * y1 + b, x2, a * y2 + b, x3, a * y3 + b)
        worst_affine = max(
            worst_affine, abs(result.x - moved.x) / max(x3 - x1, abs(result.x), 1.0)
        )
    ok = worst < 1e-12 and worst_affine < 1e-10
    assert report(
        "06 quadratic-peak",
        ok,
        f"1e4 concave triples: lsq dev {worst:.2e} < 1e-12, affine dev {worst_affine:.2e} < 1e-10",
    )


def _summary_rows(summary_path):
    with open(summary_path) as fh:
        return list(csv.DictReader(fh))


def test_acceptance_07_end_to_end_error(desk_run):
    _, _, _, summary_path = desk_run
    rows = _summary_rows(summary_path)
    assert len(rows) == 10
    worst_mae = 0.0
    worst_ratio = 0.0
    for row in rows:
        p = float(row["p_true"])
        rel_mae = float(row["rel_mae"])
        baseline = optimal_reconstruction_mae(10, p) / p
        worst_mae = max(worst_mae, rel_mae)
        worst_ratio = max(worst_ratio, rel_mae / baseline)
    ok = worst_mae < 0.10 and worst_ratio < 1.0 / 3.0
    assert report(
        "07 end-to-end-error",
        ok,
        f"max rel MAE {worst_mae:.4f} < 0.10; max MAE/baseline {worst_ratio:.4f} < 0.333",
    )


def test_acceptance_08_ci_coverage(desk_run):
    _, _, _, summary_path = desk_run
    rows = _summary_rows(summary_path)
    total = sum(int(r["n_estimations"]) for r in rows)
    missed = sum(float(r["ci_noncoverage"]) * int(r["n_estimations"]) for r in rows)
    noncoverage = missed / total
    ok = total >= 200 and 0.01 <= noncoverage <= 0.12
    assert report(
        "08 ci-coverage",
        ok,
        f"pooled 95% non-coverage {noncoverage:.4f} in [0.01, 0.12] over {total} intervals",
    )


def test_acceptance_09_monotonicity(desk_run):
    _, table_path, _, _ = desk_run
    from glsbi.distfit import read_table

    table = read_table(table_path)
    mus = [pt.gaussian.mu for pt in table.points]
    rho, _ = spstats.spearmanr(table.grid, mus)
    ok = rho > 0.95
    assert report(
        "09 monotonicity",
        ok,
        f"spikefreq table means vs p: Spearman rho {rho:.4f} > 0.95",
    )


def _sha(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


def test_acceptance_10_determinism(tmp_path):
    digests = {}
    for workers in (1, 3):
        cfg = CampaignConfig(
            n=40,
            T=5_000,
            K=3,
            grid_start=0.03,
            grid_step=0.03,
            grid_count=5,
            eval_start=0.05,
            eval_step=0.04,
            eval_count=2,
            s=5,
            n_estimations=10,
            seed=DESK_SEED,
            workers=workers,
            out=str(tmp_path / f"w{workers}"),
        )
        table_path = cmd_build_table(cfg)
        est_path, summary_path = cmd_evaluate(cfg, table_path)
        digests[workers] = (_sha(table_path), _sha(est_path), _sha(summary_path))
    ok = digests[1] == digests[3]
    assert report(
        "10 determinism",
        ok,
        "build-table and evaluate byte-identical for workers=1 and workers=3",
    )


def test_acceptance_11_reciprocal_removal(reciprocal_run):
    _, est_path = reciprocal_run
    with open(est_path) as fh:
        p_hats = np.array([float(r["p_hat"]) for r in csv.DictReader(fh)])
    target = 0.05 - 0.05**2 / 2.0
    dev = abs(p_hats.mean() - target)
    ok = len(p_hats) >= 200 and dev < 0.002
    assert report(
        "11 reciprocal-removal",
        ok,
        f"|mean(p_hat) - {target}| = {dev:.5f} < 0.002 over {len(p_hats)} estimations",
    )
