"""Acceptance criteria 1-12, each reported as one pass/fail line in the terminal summary."""

import csv
import json
import time
from collections import defaultdict
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from semishift.cli import main
from semishift.filters import (BankSpec, SsiFilter, bank_dimension, is_essential, is_refinement,
                               is_subspace, locality_equivalent, materialize,
                               refinement_degrees_ok)
from semishift.gnn import SemiGcnLayer, gcn_layer, homophily_counts, semigcn_layer
from semishift.graph import (Graph, adjacency, cycle_graph, laplacian, path_graph,
                             random_connected_graph)
from semishift.lattice import build_lattice, dedup_banks, enumerate_banks, join, meet
from semishift.spectral import build_shift, generic_perturbed_laplacian, random_signal_gft
from semishift.subgraph import (JointProblem, LearnConfig, ObservationSet, build_support, learn,
                                objective, objective_gradient)

from conftest import generic_instance, random_essential_tuple


# 1-3: dimension of a bank ---------------------------------------------------

def test_criterion_1_dimension_formula(record):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    bad = []
    for _ in range(50):
        g, s = generic_instance(rng)
        k = int(rng.integers(1, min(3, g.n) + 1))
        C = random_essential_tuple(g.n, k, rng)
        D = tuple(int(d) for d in rng.integers(0, g.n, k))
        dim = bank_dimension(BankSpec(C, D, g.n), s, 1e-8)
        if dim != sum(D) + k:
            bad.append((g.n, C, D, dim))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 30
    record(1, ok, f"50 instances, {len(bad)} mismatches, {elapsed:.1f} s")
    assert not bad, bad
    assert elapsed < 30


def test_criterion_2_singleton_dimension(record):
    rng = np.random.default_rng(7)
    checked, bad = 0, []
    for n in (3, 4, 5):
        for _ in range(10):
            g, s = generic_instance(rng, n, n)
            for v in range(n):
                for d in range(n):
                    checked += 1
                    dim = bank_dimension(BankSpec(((v,),), (d,), n), s)
                    if dim != d + 1:
                        bad.append((n, v, d, dim))
    record(2, not bad, f"{checked} singleton banks, {len(bad)} mismatches")
    assert not bad, bad


def test_criterion_3_full_space(record):
    g, s = generic_instance(np.random.default_rng(3), 3, 3)
    dim = bank_dimension(BankSpec(((0,), (1,), (2,)), (2, 2, 2), 3), s)
    record(3, dim == 9, f"dimension {dim}")
    assert dim == 9


# 4: locality ----------------------------------------------------------------

def test_criterion_4_locality(record):
    rng = np.random.default_rng(44)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 16))
        g = random_connected_graph(n, float(rng.uniform(0.1, 0.6)), rng)
        V0 = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
        d = int(rng.integers(0, 5))
        coeffs = rng.uniform(-1, 1, d + 1)
        lhs, rhs = locality_equivalent(g, V0, d, coeffs)
        full = sum(c * np.linalg.matrix_power(laplacian(g), j) for j, c in enumerate(coeffs))
        worst = max(worst, np.linalg.norm(lhs - rhs) / max(np.linalg.norm(full), 1e-300))
    record(4, worst <= 1e-9, f"100 draws, worst relative gap {worst:.2e}")
    assert worst <= 1e-9


# 5: refinement theorem ------------------------------------------------------

def _tuples(n, max_k=2):
    subsets = [tuple(c) for r in range(1, n + 1) for c in combinations(range(n), r)]
    return [C for k in range(1, max_k + 1) for C in combinations(subsets, k)]


def _refinement_counterexamples(S, n):
    tuples = _tuples(n)
    forward = converse = checked = 0
    for d in (0, 1):
        specs = {C: BankSpec(C, (d,) * len(C), n) for C in tuples}
        for C in tuples:
            coarse_union = set().union(*C)
            for Cp in tuples:
                spec, spec_p = specs[C], specs[Cp]
                conditions = is_refinement(Cp, C) and refinement_degrees_ok(spec, spec_p)
                checked += 1
                inside = is_subspace(spec, spec_p, S)
                if conditions and not inside:
                    forward += 1
                if (inside and is_essential(Cp) and set().union(*Cp) <= coarse_union
                        and not conditions):
                    converse += 1
    return checked, forward, converse


def test_criterion_5_refinement_both_directions(record):
    rng = np.random.default_rng(55)
    graphs = [path_graph(3), cycle_graph(3), path_graph(4), random_connected_graph(4, 0.5, rng)]
    total = fwd = conv = 0
    for g in graphs:
        s = generic_perturbed_laplacian(laplacian(g), rng)
        checked, f, c = _refinement_counterexamples(s, g.n)
        total, fwd, conv = total + checked, fwd + f, conv + c
    record(5, fwd == conv == 0,
           f"{total} ordered pairs, {fwd} forward and {conv} converse counterexamples")
    assert fwd == 0 and conv == 0


# 6: directed-cycle permutation ---------------------------------------------

def test_criterion_6_directed_cycle_permutation(record):
    A = adjacency(cycle_graph(8, directed=True))
    spec = BankSpec(((1, 2), (0, 5)), (1, 3), 8)
    F = materialize(SsiFilter(spec, (np.array([0.0, 1.0]), np.array([0.0, 0.0, 0.0, 1.0]))), A)
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(20):
        f = rng.normal(size=8)
        expect = np.zeros(8)
        expect[[1, 2, 5, 0]] = f[[0, 1, 2, 5]]
        worst = max(worst, np.abs(F @ f - expect).max())
    record(6, worst <= 1e-12, f"20 signals, worst entry error {worst:.1e}")
    assert worst <= 1e-12


# 7: two-vertex lattice ------------------------------------------------------

def test_criterion_7_two_vertex_lattice(record):
    s = build_shift(laplacian(path_graph(2)), "laplacian")
    lat = build_lattice(dedup_banks(enumerate_banks(2, 1), s), s)
    si = lat.index(BankSpec(((0, 1),), (1,), 2), s)
    checks = {
        "top has dim 4": lat.top is not None and lat.dims[lat.top] == 4,
        "SI node has dim 2": si is not None and lat.dims[si] == 2,
    }
    for v in (0, 1):
        single = lat.index(BankSpec(((v,),), (1,), 2), s)
        checks[f"join(SI, {{{v}}}) is top"] = join(lat, si, single) == lat.top
        checks[f"meet(SI, {{{v}}}) is bottom"] = meet(lat, si, single) == lat.bottom
    failed = [name for name, ok in checks.items() if not ok]
    record(7, not failed, f"{len(lat)} nodes, {len(lat.edges)} edges"
           + (f", failed: {failed}" if failed else ""))
    assert not failed


# 8: recovery experiment -----------------------------------------------------

BETAS = "0,0.2,0.4,0.6,0.8,1"
FAMILIES = {
    "lattice": ('{"kind": "lattice", "rows": 5, "cols": 9}', "0.4"),
    "random47": ('{"kind": "random_connected", "n": 47, "p": 0.1}', "0.6"),
}


def _run_experiment(out_dir, family):
    graph, frac = FAMILIES[family]
    argv = ["experiment", "--graph", graph, "--v0-fraction", frac, "--trials", "100",
            "--seed", "7", "--betas", BETAS, "--out-dir", str(out_dir)]
    start = time.perf_counter()
    assert main(argv) == 0
    elapsed = time.perf_counter() - start
    with open(out_dir / "aggregate.csv") as fh:
        agg = list(csv.DictReader(fh))
    with open(out_dir / "trials.csv") as fh:
        trials = list(csv.DictReader(fh))
    return {"agg": agg, "trials": trials, "elapsed": elapsed, "dir": out_dir}


@pytest.fixture(scope="module")
def experiments(tmp_path_factory):
    return {fam: _run_experiment(tmp_path_factory.mktemp(fam), fam) for fam in FAMILIES}


def _key(method, beta):
    return method, ("" if beta is None else repr(float(beta)))


def _compare(run, other_method, other_beta):
    """Per-T margins of ``other - ssi(0.6)`` in pooled and paired standard errors."""
    stats = {(a["method"], a["beta"], int(a["T"])): a for a in run["agg"]}
    per_trial = defaultdict(dict)
    for row in run["trials"]:
        per_trial[(row["method"], row["beta"], int(row["T"]))][int(row["trial"])] = \
            float(row["eval_error"])
    out = []
    for T in sorted({int(a["T"]) for a in run["agg"]}):
        mine = stats[_key("ssi", 0.6) + (T,)]
        theirs = stats[_key(other_method, other_beta) + (T,)]
        gap = float(theirs["mean_eval_error"]) - float(mine["mean_eval_error"])
        pooled = np.hypot(float(theirs["se_eval_error"]), float(mine["se_eval_error"]))
        a = per_trial[_key("ssi", 0.6) + (T,)]
        b = per_trial[_key(other_method, other_beta) + (T,)]
        diff = np.array([b[t] - a[t] for t in sorted(a)])
        paired = diff.std(ddof=1) / np.sqrt(diff.size)
        out.append((T, gap / pooled, gap / paired))
    return out


@pytest.mark.slow
@pytest.mark.parametrize("family", list(FAMILIES))
@pytest.mark.parametrize("part, method, beta", [("i", "ssi", 0.0), ("ii", "gi", None),
                                                ("iii", "lh0", None)])
def test_criterion_8_recovery_ordering(experiments, record, family, part, method, beta):
    run = experiments[family]
    margins = _compare(run, method, beta)
    failing = [T for T, pooled, _ in margins if pooled < 1.0]
    ok = not failing and run["elapsed"] < 600
    low = min(m for _, m, _ in margins)
    low_paired = min(m for _, _, m in margins)
    record(8, ok, f"{family} ({part}) vs {method}{'' if beta is None else f' beta={beta}'}: "
                  f"min margin {low:.2f} pooled SE ({low_paired:.1f} paired SE)"
                  + (f", below 1 SE at T={failing}" if failing else "")
                  + f", run {run['elapsed']:.0f} s")
    assert run["elapsed"] < 600
    assert not failing, [(T, round(p, 2), round(q, 1)) for T, p, q in margins]


# 9: learner correctness -----------------------------------------------------

def _learning_problem(seed):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(9, 0.4, rng)
    s = build_shift(laplacian(g), "laplacian")
    V0 = tuple(sorted(int(v) for v in rng.choice(9, size=5, replace=False)))
    Y = random_signal_gft(s, rng, 15)
    F = 0.3 * np.eye(9) + 0.5 * s.S + 0.1 * s.S @ s.S
    obs = ObservationSet.from_signals(V0, Y, F @ Y + 0.05 * rng.normal(size=Y.shape))
    return g, s, obs, build_support(g, V0, 1)


def test_criterion_9_learner_correctness(record):
    worst_grad = worst_fd = worst_alt = 0.0
    for seed in range(5):
        g, s, obs, spec = _learning_problem(seed)
        cfg = LearnConfig(beta=0.6, ridge=1e-8)
        res = learn(obs, spec, s, cfg)
        a = res.F.flat
        ga, gf = objective_gradient(obs, spec, s, a, res.F0, cfg.beta, cfg.ridge)
        data = np.sqrt(np.sum(obs.X ** 2) + np.sum(obs.Xp ** 2))
        worst_grad = max(worst_grad, np.linalg.norm(np.concatenate([ga, gf])) / (1 + data))

        rng = np.random.default_rng(seed)
        a1 = rng.normal(size=a.size)
        E = rng.normal(size=res.F0.shape)
        F1 = (E + E.T) / 2
        ga, gf = objective_gradient(obs, spec, s, a1, F1, cfg.beta, cfg.ridge)
        h, fd = 1e-6, []
        for k in range(a.size):
            e = np.zeros(a.size)
            e[k] = h
            fd.append((objective(obs, spec, s, a1 + e, F1, cfg.beta, cfg.ridge)
                       - objective(obs, spec, s, a1 - e, F1, cfg.beta, cfg.ridge)) / (2 * h))
        for i, j in zip(*np.triu_indices(len(obs.V0))):
            D = np.zeros_like(F1)
            D[i, j] = D[j, i] = h
            fd.append((objective(obs, spec, s, a1, F1 + D, cfg.beta, cfg.ridge)
                       - objective(obs, spec, s, a1, F1 - D, cfg.beta, cfg.ridge)) / (2 * h))
        analytic = np.concatenate([ga, gf])
        worst_fd = max(worst_fd, np.linalg.norm(analytic - fd) / np.linalg.norm(analytic))

        alt = learn(obs, spec, s, LearnConfig(beta=0.6, ridge=1e-8, solver="alternating",
                                              tol=1e-15, max_iter=20000),
                    JointProblem(obs, spec, s))
        worst_alt = max(worst_alt, abs(alt.objective - res.objective) / abs(res.objective))
    ok = worst_grad <= 1e-6 and worst_fd <= 1e-5 and worst_alt <= 1e-6
    record(9, ok, f"gradient {worst_grad:.1e}, finite differences {worst_fd:.1e}, "
                  f"solver gap {worst_alt:.1e} (relative, worst of 5)")
    assert worst_grad <= 1e-6
    assert worst_fd <= 1e-5
    assert worst_alt <= 1e-6


# 10: SemiGCN reduction ------------------------------------------------------

def test_criterion_10_semigcn_reduces_to_gcn(record):
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 15))
        g = random_connected_graph(n, float(rng.uniform(0.1, 0.7)), rng)
        f_in, f_out = (int(x) for x in rng.integers(1, 6, 2))
        H, W = rng.normal(size=(n, f_in)), rng.normal(size=(f_in, f_out))
        layer = SemiGcnLayer((tuple(range(n)),), (1,), (np.zeros((f_in, f_out)), W))
        worst = max(worst, np.abs(semigcn_layer(H, g, layer) - gcn_layer(H, g, W)).max())
    record(10, worst <= 1e-12, f"20 draws, worst entry gap {worst:.1e}")
    assert worst <= 1e-12


# 11: homophily fixtures -----------------------------------------------------

def test_criterion_11_homophily_fixtures(record):
    tri, tri_labels = cycle_graph(3), ("a", "a", "b")
    star = Graph(5, tuple((0, leaf) for leaf in range(1, 5)))
    star_labels = ("a", "b", "b", "b", "b")
    got = {
        "triangle a": homophily_counts(tri, tri_labels, "a")[0],
        "triangle b": homophily_counts(tri, tri_labels, "b")[0],
        "star a, 1 hop": homophily_counts(star, star_labels, "a", 1)[0],
        "star b, 1 hop": homophily_counts(star, star_labels, "b", 1)[0],
        "star b, 2 hops": homophily_counts(star, star_labels, "b", 2)[0],
    }
    want = {"triangle a": Fraction(1, 2), "triangle b": Fraction(0), "star a, 1 hop": Fraction(0),
            "star b, 1 hop": Fraction(0), "star b, 2 hops": Fraction(1)}
    wrong = {k: str(v) for k, v in got.items() if not (isinstance(v, Fraction) and v == want[k])}
    record(11, not wrong, "5 exact fixtures" + (f", wrong: {wrong}" if wrong else ""))
    assert not wrong


# 12: determinism ------------------------------------------------------------

@pytest.mark.slow
def test_criterion_12_rerun_from_manifest(experiments, tmp_path, record):
    first = experiments["lattice"]["dir"]
    manifest = json.loads((first / "manifest.json").read_text())
    assert manifest["command"] == "experiment" and manifest["seed"] == 7
    assert main(["experiment", "--config", str(first / "manifest.json"),
                 "--out-dir", str(tmp_path)]) == 0
    same = {name: (first / name).read_bytes() == (tmp_path / name).read_bytes()
            for name in ("trials.csv", "aggregate.csv")}
    record(12, all(same.values()), "rerun from manifest: "
           + ", ".join(f"{k} {'identical' if v else 'differs'}" for k, v in same.items()))
    assert all(same.values())
