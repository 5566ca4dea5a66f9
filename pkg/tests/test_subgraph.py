import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semishift.graph import (Graph, induced_subgraph, laplacian, lattice_graph, path_graph,
                             random_connected_graph)
from semishift.spectral import build_shift, random_signal_gft
from semishift.subgraph import (TRIAL_COLUMNS, JointProblem, LearnConfig, ObservationSet,
                                SingularSystemError, aggregate_trials, bandlimited_lift,
                                baseline_gi, baseline_subgraph_si, build_support, learn,
                                objective, objective_gradient, recovery_error, run_trial)


def lattice_id(r, c):
    return 9 * r + c


# the 22-vertex observation set on the 5 x 9 lattice: a left block, three
# vertices in column 3 and a sparse right part
SSP7_V0 = sorted(
    [lattice_id(*rc) for rc in [(0, 0), (0, 1), (0, 2), (1, 0), (2, 0), (2, 1), (2, 2),
                                (4, 0), (4, 1), (4, 2)]]
    + [lattice_id(*rc) for rc in [(0, 3), (2, 3), (4, 3)]]
    + [lattice_id(*rc) for rc in [(1, 4), (3, 4), (0, 5), (2, 5), (4, 5), (1, 6), (3, 6),
                                  (0, 7), (2, 7)]])


def random_problem(seed, n=7, frac=0.6, T=12, r=1):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(n, 0.5, rng)
    s = build_shift(laplacian(g))
    V0 = tuple(sorted(rng.choice(n, size=max(2, int(frac * n)), replace=False)))
    Y = rng.normal(size=(n, T))
    Z = rng.normal(size=(n, T))
    obs = ObservationSet.from_signals(V0, Y, Z)
    return g, s, obs, build_support(g, V0, r)


def symmetric_ls_oracle(obs):
    """Unconstrained symmetric least squares for F0 by explicit basis enumeration."""
    m = len(obs.V0)
    basis = []
    for i in range(m):
        for j in range(i, m):
            E = np.zeros((m, m))
            E[i, j] = E[j, i] = 1.0
            basis.append(E)
    A = np.column_stack([(obs.X @ E.T).ravel() for E in basis])
    c, *_ = np.linalg.lstsq(A, obs.Xp.ravel(), rcond=None)
    return sum(ci * E for ci, E in zip(c, basis))


# observations and config --------------------------------------------------------

def test_observation_validation():
    with pytest.raises(ValueError):
        ObservationSet((0, 1), np.zeros((2, 2)), np.zeros((3, 2)))
    with pytest.raises(ValueError):
        ObservationSet((0, 1), np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        ObservationSet((0,), np.array([[np.inf]]), np.array([[0.0]]))
    obs = ObservationSet.from_signals([1, 3], np.arange(20.0).reshape(4, 5), np.ones((4, 5)))
    assert obs.T == 5 and obs.X[0].tolist() == [5.0, 15.0]
    assert obs.head(2).T == 2


def test_learn_config_validation():
    for bad in ({"r": -1}, {"beta": -0.1}, {"beta": float("inf")}, {"ridge": 1e-3},
                {"solver": "newton"}):
        with pytest.raises(ValueError):
            LearnConfig(**bad)


# support construction -----------------------------------------------------------

def test_support_lattice_figure_shape():
    g = lattice_graph(5, 9)
    assert len(SSP7_V0) == 22
    spec = build_support(g, SSP7_V0, 1)
    assert [len(V) for V in spec.sets] == [13, 12]
    assert spec.degrees == (2, 3)


def test_support_path_example():
    spec = build_support(path_graph(5), [0, 1, 4], 0)
    assert spec.sets == ((0, 1), (1, 4)) and spec.degrees == (1, 3)


def test_support_single_vertex_and_isolated():
    spec = build_support(path_graph(5), [2], 2)
    assert spec.sets == ((2,),) and spec.degrees == (2,)
    g = Graph(5, ((0, 1), (1, 2)))
    spec = build_support(g, [0, 2, 4], 1)
    assert spec.sets == ((0, 2), (4,)) and spec.degrees == (3, 1)
    with pytest.raises(ValueError):
        build_support(g, [], 1)
    with pytest.raises(ValueError):
        build_support(path_graph(3), [0, 2], 1)


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 12), st.integers(0, 2**32 - 1), st.integers(0, 1))
def test_support_covers_v0(n, seed, r):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(n, 0.35, rng)
    V0 = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
    try:
        spec = build_support(g, V0, r)
    except ValueError:
        return  # degree cap exceeded on a tiny graph
    assert set().union(*map(set, spec.sets)) == set(V0)
    assert all(set(V) <= set(V0) for V in spec.sets)


# learning -----------------------------------------------------------------------

def test_identity_data_gives_identity():
    g = path_graph(6)
    s = build_shift(laplacian(g))
    rng = np.random.default_rng(0)
    Y = rng.normal(size=(6, 10))
    obs = ObservationSet.from_signals([0, 2, 3, 5], Y, Y)
    res = learn(obs, build_support(g, obs.V0, 1), s, LearnConfig(beta=0.0))
    assert np.allclose(res.F0, np.eye(4), atol=1e-6)
    assert res.objective < 1e-6
    assert np.array_equal(res.F0, res.F0.T)


def test_in_bank_filter_recovered():
    g = lattice_graph(3, 3)
    s = build_shift(laplacian(g))
    L = laplacian(g)
    Q = 0.4 * np.eye(9) + 0.3 * L + 0.2 * L @ L
    Y = random_signal_gft(s, np.random.default_rng(1), 60)
    obs = ObservationSet.from_signals(range(9), Y, Q @ Y)
    spec = build_support(g, range(9), 1)
    assert spec.degrees == (2,)
    res = learn(obs, spec, s, LearnConfig(beta=0.6, ridge=1e-10))
    assert res.objective < 1e-6
    assert np.abs(obs.X @ res.F0.T - obs.Xp).max() < 1e-6


def test_rank_one_minimum_norm():
    s = build_shift(laplacian(path_graph(4)))
    obs = ObservationSet((0, 1, 2), np.array([[1.0, 0, 0]]), np.array([[0.0, 1, 0]]))
    spec = build_support(path_graph(4), obs.V0, 0)
    res = learn(obs, spec, s, LearnConfig(beta=0.0, ridge=1e-9))
    oracle = np.zeros((3, 3))
    oracle[0, 1] = oracle[1, 0] = 1.0
    assert np.abs(res.F0 - oracle).max() < 1e-6
    assert np.linalg.norm(res.F0 @ [1.0, 0, 0] - [0.0, 1, 0]) < 1e-6


def test_singular_without_ridge():
    s = build_shift(laplacian(path_graph(4)))
    obs = ObservationSet((0, 1, 2), np.array([[1.0, 0, 0]]), np.array([[0.0, 1, 0]]))
    spec = build_support(path_graph(4), obs.V0, 0)
    with pytest.raises(SingularSystemError, match="ridge > 0"):
        learn(obs, spec, s, LearnConfig(beta=0.0, ridge=0.0))


@pytest.mark.parametrize("seed", range(5))
def test_unregularized_matches_symmetric_least_squares(seed):
    g, s, obs, spec = random_problem(seed, T=20)
    res = learn(obs, spec, s, LearnConfig(beta=0.0, ridge=0.0))
    assert np.abs(res.F0 - symmetric_ls_oracle(obs)).max() <= 1e-8


@pytest.mark.parametrize("seed", range(5))
def test_solution_is_stationary_and_optimal(seed):
    g, s, obs, spec = random_problem(seed)
    cfg = LearnConfig(beta=0.7, ridge=1e-6)
    res = learn(obs, spec, s, cfg)
    a = res.F.flat
    ga, gf = objective_gradient(obs, spec, s, a, res.F0, cfg.beta, cfg.ridge)
    data = np.sqrt(np.sum(obs.X ** 2) + np.sum(obs.Xp ** 2))
    assert np.linalg.norm(np.concatenate([ga, gf])) <= 1e-6 * (1 + data)
    rng = np.random.default_rng(seed)
    for _ in range(100):
        a2 = a + rng.normal(size=a.size) * rng.uniform(0, 1)
        E = rng.normal(size=res.F0.shape) * rng.uniform(0, 1)
        F2 = res.F0 + (E + E.T) / 2
        assert res.objective <= objective(obs, spec, s, a2, F2, cfg.beta, cfg.ridge) + 1e-9


@pytest.mark.parametrize("seed", range(3))
def test_gradient_matches_finite_differences(seed):
    g, s, obs, spec = random_problem(seed)
    rng = np.random.default_rng(100 + seed)
    a = rng.normal(size=spec.num_candidates)
    E = rng.normal(size=(len(obs.V0),) * 2)
    F0 = (E + E.T) / 2
    ga, gf = objective_gradient(obs, spec, s, a, F0, 0.8, 1e-4)
    iu, ju = np.triu_indices(len(obs.V0))
    h = 1e-6
    fd = []
    for k in range(a.size):
        e = np.zeros(a.size)
        e[k] = h
        fd.append((objective(obs, spec, s, a + e, F0, 0.8, 1e-4)
                   - objective(obs, spec, s, a - e, F0, 0.8, 1e-4)) / (2 * h))
    for i, j in zip(iu, ju):
        D = np.zeros_like(F0)
        D[i, j] = D[j, i] = h
        fd.append((objective(obs, spec, s, a, F0 + D, 0.8, 1e-4)
                   - objective(obs, spec, s, a, F0 - D, 0.8, 1e-4)) / (2 * h))
    analytic = np.concatenate([ga, gf])
    assert np.linalg.norm(analytic - fd) <= 1e-5 * np.linalg.norm(analytic)


def test_alternating_agrees_with_direct():
    g, s, obs, spec = random_problem(3)
    direct = learn(obs, spec, s, LearnConfig(beta=0.5, ridge=1e-6))
    alt = learn(obs, spec, s, LearnConfig(beta=0.5, ridge=1e-6, solver="alternating", tol=1e-15))
    assert abs(alt.objective - direct.objective) <= 1e-6 * abs(direct.objective)
    assert all(x >= y - 1e-9 for x, y in zip(alt.history, alt.history[1:]))


def test_data_term_grows_with_beta():
    g, s, obs, spec = random_problem(4, T=15)
    data = []
    for beta in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        res = learn(obs, spec, s, LearnConfig(beta=beta, ridge=1e-8))
        data.append(np.sum((obs.Xp - obs.X @ res.F0.T) ** 2))
    assert all(x <= y + 1e-9 for x, y in zip(data, data[1:]))


def test_with_observations_matches_fresh_problem():
    g, s, obs, spec = random_problem(5, T=20)
    base = JointProblem(obs, spec, s)
    sub = obs.head(7)
    H1, b1 = base.with_observations(sub).normal_matrix(0.6, 1e-8)
    H2, b2 = JointProblem(sub, spec, s).normal_matrix(0.6, 1e-8)
    assert np.allclose(H1, H2, rtol=0, atol=1e-12) and np.allclose(b1, b2, rtol=0, atol=1e-12)
    other = ObservationSet(obs.V0[:-1], obs.X[:, :-1], obs.Xp[:, :-1])
    with pytest.raises(ValueError):
        base.with_observations(other)


# recovery error and baselines ---------------------------------------------------

def test_recovery_error_examples():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(5, 3))
    F0 = rng.normal(size=(3, 3))
    obs = ObservationSet((0, 1, 2), X, X @ F0.T)
    assert recovery_error(F0, obs) < 1e-12
    assert recovery_error(np.zeros((3, 3)), obs) == pytest.approx(np.linalg.norm(obs.Xp, axis=1).mean())
    scaled = ObservationSet((0, 1, 2), 3 * X, 3 * obs.Xp)
    G = rng.normal(size=(3, 3))
    assert recovery_error(G, scaled) == pytest.approx(3 * recovery_error(G, obs))


def test_subgraph_si_baseline():
    g = lattice_graph(3, 4)
    V0 = (0, 1, 2, 5, 6, 9)
    L0 = laplacian(induced_subgraph(g, V0)[0])
    rng = np.random.default_rng(2)
    X = rng.normal(size=(8, 6))
    res = baseline_subgraph_si(ObservationSet(V0, X, X @ L0.T), g, 2)
    assert np.allclose(res.history, [0, 1, 0], atol=1e-8)
    Xp = rng.normal(size=(8, 6))
    res0 = baseline_subgraph_si(ObservationSet(V0, X, Xp), g, 0)
    assert res0.history[0] == pytest.approx(np.sum(X * Xp) / np.sum(X * X))
    edgeless = baseline_subgraph_si(ObservationSet((0, 2, 5), X[:, :3], Xp[:, :3]), g, 2)
    assert edgeless.history[1] == 0 and edgeless.history[2] == 0
    with pytest.raises(ValueError):
        baseline_subgraph_si(ObservationSet((0, 2), X[:, :2], Xp[:, :2]), g, 2)


def test_gi_baseline_cases():
    g = lattice_graph(3, 3)
    L = laplacian(g)
    s = build_shift(L)
    K = bandlimited_lift(s, range(9), 9)
    assert np.allclose(K, np.eye(9), atol=1e-12)
    K1 = bandlimited_lift(s, [0, 4, 8], 1)
    assert np.allclose(K1 @ np.full(3, 2.5), np.full(9, 2.5))
    with pytest.raises(ValueError):
        bandlimited_lift(s, [0], 0)
    Y = random_signal_gft(s, np.random.default_rng(0), 20)
    Q = 0.5 * np.eye(9) + 0.2 * L + 0.1 * L @ L
    res = baseline_gi(ObservationSet.from_signals(range(9), Y, Q @ Y), g, s, 9, 2)
    assert np.allclose(res.history, [0.5, 0.2, 0.1], atol=1e-9)
    assert np.allclose(res.F0, Q, atol=1e-9)


# trials -------------------------------------------------------------------------

def test_run_trial_rows_and_determinism():
    kw = dict(graph={"kind": "lattice", "rows": 3, "cols": 4}, v0_fraction=0.5, Ts=[5, 10],
              betas=[0.0, 0.6], seed=3, trial=2)
    rows = run_trial(**kw)
    assert rows == run_trial(**kw)
    assert len(rows) == 2 * (2 + 2)
    assert {r["method"] for r in rows} == {"ssi", "lh0", "gi"}
    assert all(set(r) == set(TRIAL_COLUMNS) for r in rows)
    assert all(r["runtime_ms"] is None for r in rows)
    assert rows != run_trial(**{**kw, "trial": 3})
    timed = run_trial(**kw, timing=True)
    assert all(r["runtime_ms"] >= 0 for r in timed)


def test_random_graph_trials_draw_their_own_graph():
    kw = dict(graph={"kind": "random_connected", "n": 20, "p": 0.2}, v0_fraction=0.6, Ts=[10],
              betas=[0.6], seed=1)
    v0s = {run_trial(**kw, trial=t)[0]["v0"] for t in range(3)}
    assert len(v0s) == 3


def test_error_shrinks_with_more_samples():
    means, ses = {}, {}
    rows = [r for t in range(100) for r in run_trial(lattice_graph(5, 9), 0.4, [10, 100], [0.6],
                                                      seed=5, trial=t)]
    agg = {(a["method"], a["T"]): a for a in aggregate_trials(rows)}
    lo, hi = agg[("ssi", 100)], agg[("ssi", 10)]
    assert lo["mean_eval_error"] <= hi["mean_eval_error"] + 2 * np.hypot(lo["se_eval_error"],
                                                                         hi["se_eval_error"])


def test_aggregate_trials():
    rows = [{"method": "gi", "beta": None, "T": 5, "eval_error": 2.0, "train_error": 1.0},
            {"method": "ssi", "beta": 0.6, "T": 5, "eval_error": 1.0, "train_error": 0.5},
            {"method": "ssi", "beta": 0.6, "T": 5, "eval_error": 3.0, "train_error": 0.5},
            {"method": "ssi", "beta": 0.0, "T": 5, "eval_error": 4.0, "train_error": 0.5}]
    agg = aggregate_trials(rows)
    assert [(a["method"], a["beta"]) for a in agg] == [("ssi", 0.0), ("ssi", 0.6), ("gi", None)]
    mid = agg[1]
    assert mid["trials"] == 2 and mid["mean_eval_error"] == 2.0
    assert mid["se_eval_error"] == pytest.approx(np.std([1.0, 3.0], ddof=1) / np.sqrt(2))
    assert agg[2]["se_eval_error"] == 0.0
