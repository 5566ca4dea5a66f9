"""Semi shift invariant filters and filter banks.

A bank is described by a :class:`BankSpec`: a tuple of vertex subsets
``(V_1, ..., V_k)`` with a degree ``d_i`` for each. Its members are the
filters ``sum_i Pbar_{V_i} Q_i(S)`` with ``deg Q_i <= d_i``, where
``Pbar_V`` zeroes every row outside ``V``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, extended_laplacian, laplacian, vertex_set
from .spectral import ShiftOperator

SupportTuple = Sequence[Iterable[int]]


@dataclass(frozen=True, order=True)
class BankSpec:
    """Supports ``sets`` and degrees ``degrees`` of a filter bank on ``n`` vertices."""

    sets: tuple[tuple[int, ...], ...]
    degrees: tuple[int, ...]
    n: int

    def __post_init__(self):
        sets = tuple(vertex_set(V, self.n) for V in self.sets)
        degrees = tuple(int(d) for d in self.degrees)
        if not sets:
            raise ValueError("a bank needs at least one support set")
        if len(sets) != len(degrees):
            raise ValueError(f"{len(sets)} support sets but {len(degrees)} degrees")
        if any(not V for V in sets):
            raise ValueError("support sets must be nonempty")
        for d in degrees:
            if not 0 <= d <= self.n - 1:
                raise ValueError(f"degree {d} outside [0, n-1] = [0, {self.n - 1}]")
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "degrees", degrees)

    @property
    def k(self) -> int:
        return len(self.sets)

    @property
    def num_candidates(self) -> int:
        return sum(d + 1 for d in self.degrees)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(set().union(*self.sets)))

    def to_dict(self) -> dict:
        return {"C": [list(V) for V in self.sets], "D": list(self.degrees)}

    @classmethod
    def from_dict(cls, d: dict, n: int) -> "BankSpec":
        extra = set(d) - {"C", "D", "coeffs"}
        if extra:
            raise ValueError(f"unknown bank spec keys {sorted(extra)}")
        return cls(tuple(tuple(V) for V in d["C"]), tuple(d["D"]), n)

    def __str__(self):
        sets = ",".join("{" + ",".join(map(str, V)) + "}" for V in self.sets)
        return f"J[({sets}),({','.join(map(str, self.degrees))})]"


@dataclass(frozen=True)
class SsiFilter:
    """A member of a bank: ``coeffs[i][j]`` multiplies ``Pbar_{V_i} S^j``."""

    spec: BankSpec
    coeffs: tuple[np.ndarray, ...]

    def __post_init__(self):
        coeffs = tuple(np.asarray(a, dtype=float) for a in self.coeffs)
        if len(coeffs) != self.spec.k:
            raise ValueError("one coefficient vector per support set is required")
        for a, d in zip(coeffs, self.spec.degrees):
            if a.shape != (d + 1,):
                raise ValueError(f"coefficient vector of shape {a.shape}, expected ({d + 1},)")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_flat(cls, spec: BankSpec, a) -> "SsiFilter":
        a = np.asarray(a, dtype=float)
        if a.shape != (spec.num_candidates,):
            raise ValueError(f"expected {spec.num_candidates} coefficients, got {a.shape}")
        splits = np.cumsum([d + 1 for d in spec.degrees])[:-1]
        return cls(spec, tuple(np.split(a, splits)))

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate(self.coeffs)

    def __add__(self, other: "SsiFilter") -> "SsiFilter":
        if other.spec != self.spec:
            raise ValueError("filters from different banks")
        return SsiFilter(self.spec, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, c: float) -> "SsiFilter":
        return SsiFilter(self.spec, tuple(c * a for a in self.coeffs))

    __rmul__ = __mul__


def _matrix(s) -> np.ndarray:
    return s.S if isinstance(s, ShiftOperator) else np.asarray(s, dtype=float)


def projection_embed(V0: Iterable[int], n: int) -> np.ndarray:
    """Diagonal 0/1 matrix keeping the entries indexed by ``V0``."""
    P = np.zeros((n, n))
    idx = list(vertex_set(V0, n))
    P[idx, idx] = 1.0
    return P


def projection_select(V0: Iterable[int], n: int) -> np.ndarray:
    """``|V0| x n`` matrix whose ``r``-th row picks the ``r``-th member of ``V0``."""
    idx = vertex_set(V0, n)
    if not idx:
        raise ValueError("projection onto an empty vertex set")
    return np.eye(n)[list(idx)]


def shift_powers(S: np.ndarray, dmax: int) -> list[np.ndarray]:
    """``[I, S, S^2, ..., S^dmax]`` by repeated multiplication."""
    powers = [np.eye(S.shape[0])]
    for _ in range(dmax):
        powers.append(powers[-1] @ S)
    return powers


def materialize(filt: SsiFilter, s) -> np.ndarray:
    """Dense matrix ``sum_i Pbar_{V_i} sum_j a_ij S^j``."""
    S = _matrix(s)
    if S.shape[0] != filt.spec.n:
        raise ValueError(f"filter on {filt.spec.n} vertices, shift on {S.shape[0]}")
    powers = shift_powers(S, max(filt.spec.degrees))
    F = np.zeros_like(S)
    for V, a in zip(filt.spec.sets, filt.coeffs):
        Q = np.zeros_like(S)
        for j, aj in enumerate(a):
            Q += aj * powers[j]
        idx = list(V)
        F[idx] += Q[idx]
    return F


@dataclass(frozen=True)
class SpanningSet:
    matrices: tuple[np.ndarray, ...]
    tags: tuple[tuple[int, int], ...]  # (set index i, power j)

    def as_columns(self) -> np.ndarray:
        """``n^2 x m`` matrix of column-major vectorised members."""
        if not self.matrices:
            return np.zeros((0, 0))
        return np.column_stack([M.ravel(order="F") for M in self.matrices])


def spanning_set(spec: BankSpec, s) -> SpanningSet:
    """The matrices ``Pbar_{V_i} S^j`` for ``0 <= j <= d_i``, ordered by ``(i, j)``."""
    S = _matrix(s)
    powers = shift_powers(S, max(spec.degrees))
    mats, tags = [], []
    for i, (V, d) in enumerate(zip(spec.sets, spec.degrees)):
        mask = np.zeros((S.shape[0], 1))
        mask[list(V)] = 1.0
        for j in range(d + 1):
            mats.append(mask * powers[j])
            tags.append((i, j))
    return SpanningSet(tuple(mats), tuple(tags))


def _spectral_polynomials(lam: np.ndarray, dmax: int) -> np.ndarray:
    """Values ``q_k(lambda_i)`` of polynomials orthonormal on the spectrum.

    Stieltjes/Arnoldi on ``diag(lam)`` from the constant vector, with full
    reorthogonalisation. If the Krylov space saturates (numerically repeated
    eigenvalues) the remaining columns are zero: those polynomials already
    lie in the span of the earlier ones on this spectrum.
    """
    n = lam.size
    scale = max(float(np.abs(lam).max(initial=0.0)), 1.0)
    Q = np.zeros((n, dmax + 1))
    Q[:, 0] = 1.0 / np.sqrt(n)
    for k in range(1, dmax + 1):
        w = lam * Q[:, k - 1]
        for _ in range(2):
            w -= Q[:, :k] @ (Q[:, :k].T @ w)
        size = np.linalg.norm(w)
        if size <= 1e-12 * scale:
            break
        Q[:, k] = w / size
    return Q


def polynomial_basis(s, dmax: int, basis: str = "spectral") -> list[np.ndarray]:
    """Matrices ``p_0(S), ..., p_dmax(S)`` for a basis of polynomials of degree <= dmax.

    Every choice spans the same space as the monomials ``S^j``; they differ
    in conditioning.

    * ``spectral`` (symmetric ``S``): polynomials orthonormal on the
      eigenvalues, so ``||q(S)||_F`` equals the coefficient norm and small
      eigenvalue gaps do not shrink the basis.
    * ``chebyshev`` (symmetric ``S``): Chebyshev polynomials on the
      spectral interval.
    * ``monomial``: the plain powers ``S^j``.

    Non-symmetric shifts use monomials of ``S / rho(S)`` for the first two.
    """
    S = _matrix(s)
    if basis == "monomial":
        return shift_powers(S, dmax)
    if basis not in ("spectral", "chebyshev"):
        raise ValueError(f"unknown polynomial basis {basis!r}")
    n = S.shape[0]
    if np.array_equal(S, S.T):
        if basis == "spectral":
            if isinstance(s, ShiftOperator):
                lam, U = s.eigenvalues, s.U
            else:
                lam, U = np.linalg.eigh(S)
            Q = _spectral_polynomials(np.asarray(lam, dtype=float), dmax)
            return [(U * Q[:, k]) @ U.T for k in range(dmax + 1)]
        lam = s.eigenvalues if isinstance(s, ShiftOperator) else np.linalg.eigvalsh(S)
        lo, hi = float(lam.min()), float(lam.max())
        if hi - lo <= 1e-14 * max(abs(hi), 1.0):
            return shift_powers(S, dmax)
        X = (2.0 * S - (hi + lo) * np.eye(n)) / (hi - lo)
        out = [np.eye(n), X]
        while len(out) <= dmax:
            out.append(2.0 * X @ out[-1] - out[-2])
        return out[: dmax + 1]
    rho = np.abs(np.linalg.eigvals(S)).max()
    return shift_powers(S / rho if rho > 0 else S, dmax)


def bank_matrix(spec: BankSpec, s, basis: str = "spectral") -> np.ndarray:
    """Unit-normalised vectorised spanning members of the bank, one per column."""
    S = _matrix(s)
    if S.shape[0] != spec.n:
        raise ValueError(f"bank on {spec.n} vertices, shift on {S.shape[0]}")
    polys = polynomial_basis(s, max(spec.degrees), basis)
    cols = []
    for V, d in zip(spec.sets, spec.degrees):
        idx = list(V)
        for j in range(d + 1):
            M = np.zeros_like(S)
            M[idx] = polys[j][idx]
            cols.append(M.ravel(order="F"))
    A = np.column_stack(cols)
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    return A / norms


def numerical_rank(A: np.ndarray, tol: float = 1e-8) -> int:
    """Number of singular values above ``tol * sigma_max``."""
    if A.size == 0:
        return 0
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def bank_dimension(spec: BankSpec, s, tol: float = 1e-8, basis: str = "spectral") -> int:
    return numerical_rank(bank_matrix(spec, s, basis), tol)


def is_subspace(spec_a: BankSpec, spec_b: BankSpec, s, tol: float = 1e-8,
                basis: str = "spectral") -> bool:
    """Whether the bank of ``spec_a`` is contained in the bank of ``spec_b``."""
    if spec_a.n != spec_b.n:
        raise ValueError("banks on different vertex counts")
    A = bank_matrix(spec_a, s, basis)
    B = bank_matrix(spec_b, s, basis)
    return numerical_rank(B, tol) == numerical_rank(np.hstack([A, B]), tol)


# combinatorics of support tuples ----------------------------------------------

def _as_sets(C: SupportTuple) -> list[frozenset]:
    return [frozenset(int(v) for v in V) for V in C]


def is_essential(C: SupportTuple) -> bool:
    """Every set has a vertex that no other set in the tuple covers."""
    sets = _as_sets(C)
    for i, V in enumerate(sets):
        rest = set().union(*(W for j, W in enumerate(sets) if j != i))
        if not V - rest:
            return False
    return True


@dataclass(frozen=True)
class RefinementReport:
    same_union: bool
    each_contained: bool
    disjoint_within_parent: bool
    parents_partitioned: bool

    @property
    def failed(self) -> tuple[str, ...]:
        names = ("same_union", "each_contained", "disjoint_within_parent", "parents_partitioned")
        return tuple(name for name in names if not getattr(self, name))

    def holds(self, strict: bool = True) -> bool:
        ok = self.same_union and self.each_contained and self.disjoint_within_parent
        return ok and (self.parents_partitioned or not strict)


def refinement_report(Cp: SupportTuple, C: SupportTuple) -> RefinementReport:
    """Evaluate each clause of "``Cp`` refines ``C``" separately.

    ``parents_partitioned`` asks that every ``V_i`` be exactly the union of
    the ``V'_j`` it contains. It is implied by the other clauses whenever the
    sets of ``C`` are pairwise disjoint, but not in general.
    """
    fine, coarse = _as_sets(Cp), _as_sets(C)
    same_union = set().union(*fine) == set().union(*coarse)
    each_contained = all(any(W <= V for V in coarse) for W in fine)
    disjoint = True
    parents_partitioned = True
    for V in coarse:
        inside = [W for W in fine if W <= V]
        if any(a & b for a, b in combinations(inside, 2)):
            disjoint = False
        if set().union(*inside) != V:
            parents_partitioned = False
    return RefinementReport(same_union, each_contained, disjoint, parents_partitioned)


def is_refinement(Cp: SupportTuple, C: SupportTuple, strict: bool = True) -> bool:
    """Whether ``Cp`` refines ``C``.

    With ``strict=False`` only the three clauses (same union, each fine set
    inside a coarse one, fine sets sharing a parent are disjoint) are
    checked. The default also requires each coarse set to be partitioned by
    the fine sets it contains, which is what makes the bank inclusion
    ``J_{C,D} <= J_{Cp,Dp}`` hold.
    """
    return refinement_report(Cp, C).holds(strict)


def refinement_degrees_ok(spec: BankSpec, spec_p: BankSpec) -> bool:
    """``d_i <= d'_j`` whenever ``V'_j`` lies inside ``V_i``."""
    for V, d in zip(_as_sets(spec.sets), spec.degrees):
        for W, dp in zip(_as_sets(spec_p.sets), spec_p.degrees):
            if W <= V and d > dp:
                return False
    return True


def locality_equivalent(g: Graph, V0: Iterable[int], d: int, coeffs=None,
                        rng: np.random.Generator | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the locality identity for a degree-``d`` polynomial ``Q``.

    Returns ``(Pbar Q(L_G), Pbar Q(L_{V0,d}))`` where ``L_{V0,d}`` is the
    Laplacian of the ``d``-hop ball around ``V0``. ``coeffs`` (length
    ``d + 1``, constant term first) defaults to a Uniform[-1, 1] draw.
    """
    if coeffs is None:
        coeffs = (rng or np.random.default_rng()).uniform(-1.0, 1.0, d + 1)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (d + 1,):
        raise ValueError(f"need {d + 1} coefficients for degree {d}")
    P = projection_embed(V0, g.n)

    def evaluate(M):
        return sum(c * Mj for c, Mj in zip(coeffs, shift_powers(M, d)))

    return P @ evaluate(laplacian(g)), P @ evaluate(extended_laplacian(g, V0, d))
