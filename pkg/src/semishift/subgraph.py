"""Filter estimation from signals observed on a vertex subset.

Given input/output pairs observed only on ``V0``, :func:`learn` fits a
symmetric ``|V0| x |V0|`` filter ``F0`` jointly with an ambient semi shift
invariant filter ``F`` by minimising

    sum_t ||x'_t - F0 x_t||^2 + beta * ||P F - F0 P||_F^2
        + ridge * (||a||^2 + ||F0||_F^2)

where ``P`` selects the rows in ``V0`` and ``a`` are the coefficients of
``F`` in its bank. The problem is a convex quadratic and is solved exactly.
"""

from __future__ import annotations

import copy
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .filters import BankSpec, SsiFilter, materialize, projection_select, spanning_set
from .graph import (Graph, all_hop_distances, induced_subgraph, laplacian,
                    make_graph, vertex_set)
from .spectral import ShiftOperator, build_shift, random_signal_gft


class SingularSystemError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class ObservationSet:
    """Paired observations on ``V0``: row ``t`` of ``X`` is ``x_t``, of ``Xp`` is ``x'_t``."""

    V0: tuple[int, ...]
    X: np.ndarray
    Xp: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Xp = np.atleast_2d(np.asarray(self.Xp, dtype=float))
        if X.shape != Xp.shape:
            raise ValueError(f"inputs {X.shape} and outputs {Xp.shape} differ in shape")
        if X.shape[0] < 1 or X.shape[1] != len(self.V0):
            raise ValueError(f"need T >= 1 rows of |V0| = {len(self.V0)} entries, got {X.shape}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Xp))):
            raise ValueError("observations must be finite")
        object.__setattr__(self, "V0", tuple(int(v) for v in self.V0))
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Xp", Xp)

    @property
    def T(self) -> int:
        return self.X.shape[0]

    @classmethod
    def from_signals(cls, V0: Iterable[int], Y: np.ndarray, Z: np.ndarray) -> "ObservationSet":
        """Restrict full signals (columns of ``Y`` and ``Z``) to ``V0``."""
        idx = list(V0)
        return cls(tuple(idx), np.asarray(Y)[idx].T, np.asarray(Z)[idx].T)

    def head(self, T: int) -> "ObservationSet":
        return ObservationSet(self.V0, self.X[:T], self.Xp[:T])


@dataclass(frozen=True)
class LearnConfig:
    r: int = 1
    beta: float = 0.6
    ridge: float = 1e-8
    tol: float = 1e-9
    solver: str = "direct"  # or "alternating"
    max_iter: int = 20_000

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("degree slack r must be >= 0")
        if not (np.isfinite(self.beta) and self.beta >= 0):
            raise ValueError("beta must be finite and >= 0")
        if not 0 <= self.ridge < 1e-3:
            raise ValueError("ridge must lie in [0, 1e-3)")
        if self.solver not in ("direct", "alternating"):
            raise ValueError(f"unknown solver {self.solver!r}")


@dataclass(frozen=True)
class LearnResult:
    F0: np.ndarray
    F: SsiFilter | None
    objective: float
    history: tuple[float, ...] = field(default=())


# support construction -----------------------------------------------------------

def build_support(g: Graph, V0: Iterable[int], r: int) -> BankSpec:
    """Support tuple and degrees adapted to the spacing of ``V0`` in ``g``.

    A vertex of ``V0`` whose nearest other ``V0`` vertex sits ``i`` hops away
    goes into ``V_i`` together with all its ``V0`` vertices at exactly ``i``
    hops; ``V_i`` gets degree ``i + r``. Empty ``V_i`` are dropped. Vertices
    with no other ``V0`` vertex in reach form one extra set of degree ``r``.
    """
    V0 = vertex_set(V0, g.n)
    if not V0:
        raise ValueError("V0 must be nonempty")
    if r < 0:
        raise ValueError("r must be >= 0")
    idx = list(V0)
    dist = all_hop_distances(g)[np.ix_(idx, idx)]
    np.fill_diagonal(dist, np.inf)
    groups: dict[int, set[int]] = {}
    lonely = []
    for a, v in enumerate(V0):
        near = dist[a].min()
        if not np.isfinite(near):
            lonely.append(v)
            continue
        i = int(near)
        groups.setdefault(i, set()).add(v)
        groups[i].update(V0[b] for b in np.flatnonzero(dist[a] == i))
    sets = [tuple(sorted(groups[i])) for i in sorted(groups)]
    degrees = [i + r for i in sorted(groups)]
    if lonely:
        sets.append(tuple(lonely))
        degrees.append(r)
    cap = g.n - 1
    if any(d > cap for d in degrees):
        raise ValueError(f"degree slack r = {r} pushes a degree above n - 1 = {cap}")
    return BankSpec(tuple(sets), tuple(degrees), g.n)


# the joint quadratic ---------------------------------------------------------------

def _sym_pairs(m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(m)


def _duplication(m: int) -> sp.csr_matrix:
    """Sparse ``m^2 x m(m+1)/2`` map from upper-triangle entries to ``vec(F0)`` (column-major)."""
    iu, ju = _sym_pairs(m)
    cols = np.arange(iu.size)
    rows = np.concatenate([ju * m + iu, (iu * m + ju)[iu != ju]])
    cc = np.concatenate([cols, cols[iu != ju]])
    return sp.csr_matrix((np.ones(rows.size), (rows, cc)), shape=(m * m, iu.size))


def _sym_from_upper(f: np.ndarray, m: int) -> np.ndarray:
    F0 = np.zeros((m, m))
    iu, ju = _sym_pairs(m)
    F0[iu, ju] = f
    F0[ju, iu] = f
    return F0


def _upper_from_sym(F0: np.ndarray) -> np.ndarray:
    return F0[_sym_pairs(F0.shape[0])]


def _spd_solve(H: np.ndarray, rhs: np.ndarray, ridge: float) -> np.ndarray:
    """Cholesky solve after symmetric Jacobi scaling."""
    d = np.sqrt(np.diag(H))
    if np.any(d == 0):
        raise SingularSystemError("normal matrix is singular; use ridge > 0")
    Hs = H / d[:, None] / d[None, :]
    try:
        c = la.cho_factor(Hs)
    except la.LinAlgError:
        raise SingularSystemError("normal matrix is singular; use ridge > 0") from None
    if ridge == 0:
        diag = np.diag(c[0]) ** 2
        if diag.min() <= 1e-13 * diag.max():
            raise SingularSystemError("normal matrix is singular; use ridge > 0")
    return la.cho_solve(c, rhs / d) / d


class JointProblem:
    """Normal equations of the joint objective, reusable across ``beta``.

    Unknowns are stacked as ``theta = (a, f)`` with ``f`` the upper triangle
    of ``F0`` (row-major ``triu`` order).
    """

    def __init__(self, obs: ObservationSet, spec: BankSpec, s):
        S = s.S if isinstance(s, ShiftOperator) else np.asarray(s, dtype=float)
        if S.shape[0] != spec.n:
            raise ValueError(f"bank on {spec.n} vertices, shift on {S.shape[0]}")
        if not set(obs.V0) <= set(range(spec.n)):
            raise ValueError("V0 is not a subset of the shift's vertices")
        self.obs, self.spec = obs, spec
        m0 = len(obs.V0)
        self.m0 = m0
        self.P = projection_select(obs.V0, spec.n)
        self.Dup = _duplication(m0)
        # P B_k for each bank member, vectorised column-major
        PB = [M[list(obs.V0)] for M in spanning_set(spec, S).matrices]
        self.PB = PB
        Psi = np.column_stack([M.ravel(order="F") for M in PB])
        self.Psi = Psi
        self.H_aa = Psi.T @ Psi
        # <P B_k, F0 P> = <P B_k P^T, F0>
        cross = np.column_stack([M[:, list(obs.V0)].ravel(order="F") for M in PB])
        self.H_af = -(self.Dup.T @ cross).T
        self.H_ff_reg = (self.Dup.T @ self.Dup).toarray()
        self.ridge_diag = np.concatenate([np.ones(len(PB)), np.diag(self.H_ff_reg)])
        self._set_data(obs)

    def _set_data(self, obs: ObservationSet):
        if obs.V0 != self.obs.V0:
            raise ValueError("observations live on a different V0")
        self.obs = obs
        G = obs.X.T @ obs.X
        self.H_ff_data = (self.Dup.T @ sp.kron(sp.identity(self.m0), G) @ self.Dup).toarray()
        self.b_f = self.Dup.T @ (obs.X.T @ obs.Xp).ravel(order="F")
        self.yy = float(np.sum(obs.Xp ** 2))

    def with_observations(self, obs: ObservationSet) -> "JointProblem":
        """Same bank and ``V0``, new data; the regulariser blocks are shared."""
        new = copy.copy(self)
        new._set_data(obs)
        return new

    @property
    def num_a(self) -> int:
        return len(self.PB)

    def normal_matrix(self, beta: float, ridge: float) -> tuple[np.ndarray, np.ndarray]:
        top = np.hstack([beta * self.H_aa, beta * self.H_af])
        bottom = np.hstack([beta * self.H_af.T, self.H_ff_data + beta * self.H_ff_reg])
        H = np.vstack([top, bottom]) + ridge * np.diag(self.ridge_diag)
        rhs = np.concatenate([np.zeros(self.num_a), self.b_f])
        return H, rhs

    def split(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a, f = theta[: self.num_a], theta[self.num_a:]
        return a, _sym_from_upper(f, self.m0)

    def solve(self, beta: float, ridge: float) -> np.ndarray:
        H, rhs = self.normal_matrix(beta, ridge)
        if beta == 0:
            # F drops out of the objective; a = 0 is its minimum-norm choice
            na = self.num_a
            f = _spd_solve(H[na:, na:], rhs[na:], ridge)
            return np.concatenate([np.zeros(na), f])
        return _spd_solve(H, rhs, ridge)

    def solve_alternating(self, beta: float, ridge: float, tol: float = 1e-12,
                          max_iter: int = 20_000) -> tuple[np.ndarray, list[float]]:
        """Block coordinate descent: exact ``F0`` step, then exact ``a`` step."""
        na = self.num_a
        H, rhs = self.normal_matrix(beta, ridge)
        Haa, Haf, Hff = H[:na, :na], H[:na, na:], H[na:, na:]
        try:
            ca = la.cho_factor(Haa)
            cf = la.cho_factor(Hff)
        except la.LinAlgError:
            raise SingularSystemError("normal matrix block is singular; use ridge > 0") from None
        a = np.zeros(na)
        f = la.cho_solve(cf, rhs[na:])
        history = [self.objective_theta(np.concatenate([a, f]), beta, ridge)]
        for _ in range(max_iter):
            a = la.cho_solve(ca, -Haf @ f)
            f = la.cho_solve(cf, rhs[na:] - Haf.T @ a)
            history.append(self.objective_theta(np.concatenate([a, f]), beta, ridge))
            if history[-2] - history[-1] <= tol * max(abs(history[-1]), 1e-300):
                break
        return np.concatenate([a, f]), history

    def objective_theta(self, theta: np.ndarray, beta: float, ridge: float) -> float:
        H, rhs = self.normal_matrix(beta, ridge)
        return float(theta @ H @ theta - 2 * rhs @ theta + self.yy)


def objective(obs: ObservationSet, spec: BankSpec, s, a, F0: np.ndarray, beta: float,
              ridge: float = 0.0) -> float:
    """Direct evaluation of the joint objective (no normal-equation shortcuts)."""
    S = s.S if isinstance(s, ShiftOperator) else np.asarray(s, dtype=float)
    F = materialize(SsiFilter.from_flat(spec, a), S)
    P = projection_select(obs.V0, spec.n)
    data = np.sum((obs.Xp - obs.X @ F0.T) ** 2)
    reg = np.sum((P @ F - F0 @ P) ** 2)
    return float(data + beta * reg + ridge * (np.sum(np.asarray(a) ** 2) + np.sum(F0 ** 2)))


def objective_gradient(obs: ObservationSet, spec: BankSpec, s, a, F0: np.ndarray,
                       beta: float, ridge: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of :func:`objective` in ``a`` and in the upper-triangle entries of ``F0``.

    ``F0`` must be symmetric; the second output is ordered like
    ``np.triu_indices``.
    """
    S = s.S if isinstance(s, ShiftOperator) else np.asarray(s, dtype=float)
    a = np.asarray(a, dtype=float)
    F = materialize(SsiFilter.from_flat(spec, a), S)
    P = projection_select(obs.V0, spec.n)
    R = obs.Xp - obs.X @ F0.T
    E = P @ F - F0 @ P
    G_F0 = -2 * R.T @ obs.X - 2 * beta * E @ P.T + 2 * ridge * F0
    PB = [M[list(obs.V0)] for M in spanning_set(spec, S).matrices]
    g_a = np.array([2 * beta * np.sum(M * E) for M in PB]) + 2 * ridge * a
    # chain rule through F0[i, j] = F0[j, i] = f_ij
    G_sym = G_F0 + G_F0.T - np.diag(np.diag(G_F0))
    return g_a, _upper_from_sym(G_sym)


def learn(obs: ObservationSet, spec: BankSpec, s, cfg: LearnConfig = LearnConfig(),
          problem: JointProblem | None = None) -> LearnResult:
    """Jointly fit ``F0`` (symmetric, on ``V0``) and ``F`` in the bank ``spec``."""
    prob = problem or JointProblem(obs, spec, s)
    if cfg.solver == "direct":
        theta = prob.solve(cfg.beta, cfg.ridge)
        history = []
    else:
        theta, history = prob.solve_alternating(cfg.beta, cfg.ridge, cfg.tol, cfg.max_iter)
    a, F0 = prob.split(theta)
    value = objective(obs, spec, s, a, F0, cfg.beta, cfg.ridge)
    if not np.isfinite(value):
        raise SingularSystemError("objective is not finite at the computed solution")
    return LearnResult(F0, SsiFilter.from_flat(spec, a), value, tuple(history))


def recovery_error(F0: np.ndarray, obs: ObservationSet) -> float:
    """Mean over samples of ``||x'_t - F0 x_t||_2``."""
    return float(np.mean(np.linalg.norm(obs.Xp - obs.X @ np.asarray(F0).T, axis=1)))


# baselines -------------------------------------------------------------------------

def _fit_polynomial(blocks: Sequence[np.ndarray], obs: ObservationSet, ridge: float) -> np.ndarray:
    """Least squares for ``F0 = sum_j c_j blocks[j]``."""
    A = np.column_stack([(obs.X @ M.T).ravel() for M in blocks])
    y = obs.Xp.ravel()
    if ridge > 0:
        A = np.vstack([A, np.sqrt(ridge) * np.eye(len(blocks))])
        y = np.concatenate([y, np.zeros(len(blocks))])
    c, *_ = np.linalg.lstsq(A, y, rcond=None)
    return c


def baseline_subgraph_si(obs: ObservationSet, g: Graph, degree: int = 2,
                         ridge: float = 0.0) -> LearnResult:
    """``F0`` as a polynomial in the Laplacian of the subgraph induced on ``V0``."""
    if degree > len(obs.V0) - 1:
        raise ValueError(f"degree {degree} exceeds |V0| - 1 = {len(obs.V0) - 1}")
    H0, _ = induced_subgraph(g, obs.V0)
    L0 = laplacian(H0)
    powers = [np.eye(H0.n)]
    for _ in range(degree):
        powers.append(powers[-1] @ L0)
    c = _fit_polynomial(powers, obs, ridge)
    F0 = sum(cj * M for cj, M in zip(c, powers))
    value = float(np.sum((obs.Xp - obs.X @ F0.T) ** 2) + ridge * np.sum(c ** 2))
    return LearnResult(F0, None, value, tuple(c))


def bandlimited_lift(s: ShiftOperator, V0: Sequence[int], bandwidth: int) -> np.ndarray:
    """``n x |V0|`` map taking samples on ``V0`` to the least-squares (minimum-norm)
    signal spanned by the ``bandwidth`` lowest-frequency eigenvectors."""
    if bandwidth < 1:
        raise ValueError("bandwidth must be >= 1")
    if bandwidth > s.n:
        raise ValueError(f"bandwidth {bandwidth} exceeds n = {s.n}")
    order = np.argsort(s.eigenvalues.real, kind="stable")
    UB = s.U[:, order[:bandwidth]].real
    return UB @ np.linalg.pinv(UB[list(V0)])


def baseline_gi(obs: ObservationSet, g: Graph, s: ShiftOperator, bandwidth: int | None = None,
                degree: int = 2, ridge: float = 0.0) -> LearnResult:
    """Interpolate to the full graph, then fit a polynomial in ``S`` there.

    Each ``x_t`` is lifted by :func:`bandlimited_lift` (default bandwidth
    ``|V0|``) and the prediction is ``P Q(S) lift(x_t)``. The effective
    ``F0 = P Q(S) K`` is returned; it is generally not symmetric.
    """
    bandwidth = len(obs.V0) if bandwidth is None else bandwidth
    K = bandlimited_lift(s, obs.V0, bandwidth)
    S = s.S
    idx = list(obs.V0)
    powers = [np.eye(s.n)]
    for _ in range(degree):
        powers.append(powers[-1] @ S)
    blocks = [M[idx] @ K for M in powers]
    c = _fit_polynomial(blocks, obs, ridge)
    F0 = sum(cj * M for cj, M in zip(c, blocks))
    value = float(np.sum((obs.Xp - obs.X @ F0.T) ** 2) + ridge * np.sum(c ** 2))
    return LearnResult(F0, None, value, tuple(c))


# the synthetic protocol ----------------------------------------------------------------

TRIAL_COLUMNS = ("seed", "trial", "method", "T", "beta", "train_error", "eval_error",
                 "objective", "runtime_ms", "v0")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for trial ``trial`` of a run with master seed ``seed``."""
    return np.random.default_rng([int(seed), int(trial)])


def run_trial(graph, v0_fraction: float, Ts: Sequence[int], betas: Sequence[float],
              r: int = 1, seed: int = 0, trial: int = 0, n_eval: int | None = None,
              ridge: float = 1e-8, lh0_degree: int = 2, gi_degree: int = 2,
              gi_bandwidth: int | None = None, V0: Sequence[int] | None = None,
              timing: bool = False) -> list[dict]:
    """One draw of the synthetic filter-recovery experiment.

    ``graph`` is a :class:`Graph` or a ``{"kind": ..., **params}`` dict, in
    which case a fresh graph is generated from the trial's stream. The
    ground truth is ``a0 + a1 L + a2 L^2`` with ``a_i ~ U[0, 1]``; inputs have
    i.i.d. Uniform[0, 1] GFT coefficients. Training uses the first ``T``
    draws of a training pool, evaluation the first ``n_eval`` (default
    ``T``) draws of an independent pool. One row is returned per
    ``(T, method, beta)`` with methods ``ssi`` (one row per beta), ``lh0``
    and ``gi``; the ``v0`` field lists the observed vertices.
    """
    rng = trial_rng(seed, trial)
    if isinstance(graph, dict):
        params = {k: v for k, v in graph.items() if k != "kind"}
        g = make_graph(graph["kind"], seed=int(rng.integers(2**63)), **params)
    else:
        g = graph
    L = laplacian(g)
    s = build_shift(L, "laplacian")
    if V0 is None:
        n0 = max(1, int(round(v0_fraction * g.n)))
        V0 = np.sort(rng.choice(g.n, size=n0, replace=False))
    V0 = tuple(int(v) for v in V0)
    coeffs = rng.uniform(0.0, 1.0, 3)
    Ftrue = coeffs[0] * np.eye(g.n) + coeffs[1] * L + coeffs[2] * L @ L
    Tmax = max(Ts)
    Y = random_signal_gft(s, rng, Tmax)
    Ye = random_signal_gft(s, rng, max(Ts) if n_eval is None else n_eval)
    train = ObservationSet.from_signals(V0, Y, Ftrue @ Y)
    held = ObservationSet.from_signals(V0, Ye, Ftrue @ Ye)
    spec = build_support(g, V0, r)

    rows = []

    def record(method, T, beta, res, evalset, t0):
        rows.append({
            "seed": seed, "trial": trial, "method": method, "T": T,
            "beta": beta, "train_error": recovery_error(res.F0, train.head(T)),
            "eval_error": recovery_error(res.F0, evalset), "objective": res.objective,
            "runtime_ms": (time.perf_counter() - t0) * 1e3 if timing else None,
            "v0": " ".join(map(str, V0)),
        })

    base = JointProblem(train, spec, s)
    for T in Ts:
        obs = train.head(T)
        evalset = held.head(T if n_eval is None else n_eval)
        t0 = time.perf_counter()
        prob = base.with_observations(obs)
        for beta in betas:
            res = learn(obs, spec, s, LearnConfig(r=r, beta=float(beta), ridge=ridge), prob)
            record("ssi", T, float(beta), res, evalset, t0)
            t0 = time.perf_counter()
        record("lh0", T, None, baseline_subgraph_si(obs, g, min(lh0_degree, len(V0) - 1), ridge),
               evalset, t0)
        t0 = time.perf_counter()
        record("gi", T, None, baseline_gi(obs, g, s, gi_bandwidth, gi_degree, ridge), evalset, t0)
    return rows


AGGREGATE_COLUMNS = ("method", "beta", "T", "trials", "mean_eval_error", "se_eval_error",
                     "mean_train_error", "se_train_error")
_METHOD_ORDER = {"ssi": 0, "lh0": 1, "gi": 2}


def aggregate_trials(rows: Sequence[dict]) -> list[dict]:
    """Mean and standard error of the errors per ``(method, beta, T)``.

    The standard error is the sample standard deviation over trials divided
    by the square root of the trial count (0 for a single trial).
    """
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((row["method"], row["beta"], row["T"]), []).append(row)

    def sort_key(key):
        method, beta, T = key
        return (_METHOD_ORDER.get(method, len(_METHOD_ORDER)), method,
                -1.0 if beta is None else beta, T)

    out = []
    for key in sorted(groups, key=sort_key):
        rec = dict(zip(("method", "beta", "T"), key))
        rec["trials"] = len(groups[key])
        for col in ("eval_error", "train_error"):
            v = np.array([r[col] for r in groups[key]], dtype=float)
            rec[f"mean_{col}"] = float(v.mean())
            rec[f"se_{col}"] = float(v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else 0.0
        out.append(rec)
    return out
