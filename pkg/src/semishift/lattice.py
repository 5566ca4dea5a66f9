"""The containment order on filter banks and its Hasse diagram."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .filters import BankSpec, bank_matrix, numerical_rank


class EnumerationGuardError(ValueError):
    pass


def enumerate_banks(n: int, max_d: int, max_k: int = 2, max_set_size: int | None = None,
                    guard: int = 4) -> list[BankSpec]:
    """All banks built from distinct ``(subset, degree)`` items.

    A bank with ``k`` sets is an unordered choice of ``k`` distinct items,
    each item a nonempty subset of ``range(n)`` (of size at most
    ``max_set_size``) paired with a degree ``<= max_d``. Specs that happen to
    span the same space are all kept; see :func:`dedup_banks`.

    ``n`` above ``guard`` raises unless ``max_set_size`` is given explicitly.
    """
    if n > guard and max_set_size is None:
        raise EnumerationGuardError(
            f"n = {n} exceeds the enumeration guard ({guard}); pass max_set_size to override")
    max_d = min(max_d, n - 1)
    size = n if max_set_size is None else max_set_size
    subsets = [c for r in range(1, size + 1) for c in combinations(range(n), r)]
    items = [(V, d) for V in subsets for d in range(max_d + 1)]
    specs = []
    for k in range(1, max_k + 1):
        for combo in combinations(items, k):
            specs.append(BankSpec(tuple(V for V, _ in combo), tuple(d for _, d in combo), n))
    return specs


def _orthonormal_span(spec: BankSpec, s, tol: float) -> np.ndarray:
    U, sv, _ = np.linalg.svd(bank_matrix(spec, s), full_matrices=False)
    if sv.size == 0 or sv[0] == 0:
        return U[:, :0]
    return U[:, sv > tol * sv[0]]


def containment_matrix(bases: Sequence[np.ndarray], tol: float = 1e-8) -> np.ndarray:
    """``M[a, b]`` is True when span ``a`` lies inside span ``b``.

    ``bases`` are orthonormal column bases; the test is
    ``rank([a b]) == rank(b)`` at relative tolerance ``tol``.
    """
    m = len(bases)
    M = np.zeros((m, m), dtype=bool)
    for a in range(m):
        for b in range(m):
            A, B = bases[a], bases[b]
            if A.shape[1] == 0:
                M[a, b] = True
            elif A.shape[1] <= B.shape[1]:
                M[a, b] = numerical_rank(np.hstack([A, B]), tol) == B.shape[1]
    return M


def dedup_banks(specs: Sequence[BankSpec], s, tol: float = 1e-8) -> list[BankSpec]:
    """One spec per distinct span, the smallest spec of each class in sort order."""
    specs = sorted(set(specs))
    bases = [_orthonormal_span(sp, s, tol) for sp in specs]
    M = containment_matrix(bases, tol)
    keep = []
    for i, sp in enumerate(specs):
        if not any(M[i, j] and M[j, i] for j in keep):
            keep.append(i)
    return [specs[i] for i in keep]


@dataclass(frozen=True, eq=False)
class BankLattice:
    """Hasse diagram of banks under inclusion.

    ``specs[i]`` is ``None`` for the adjoined zero space. ``edges`` holds
    ``(child, parent)`` pairs where ``child`` is a maximal proper subspace of
    ``parent`` among the listed nodes, and ``leq[a, b]`` records inclusion.
    """

    specs: tuple[BankSpec | None, ...]
    dims: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    leq: np.ndarray
    bases: tuple[np.ndarray, ...]
    tol: float = 1e-8

    def __len__(self):
        return len(self.specs)

    def index(self, spec: BankSpec | None, s=None) -> int:
        """Node whose span equals that of ``spec`` (``None`` is the zero space).

        Specs that are not literally nodes are matched by span, which needs
        the shift ``s``.
        """
        if spec in self.specs:
            return self.specs.index(spec)
        if s is not None:
            A = _orthonormal_span(spec, s, self.tol)
            for i, B in enumerate(self.bases):
                if B.shape[1] == A.shape[1] and containment_matrix([A, B], self.tol)[0, 1]:
                    return i
        raise KeyError(f"{spec} does not span any lattice node")

    @property
    def top(self) -> int | None:
        tops = [i for i in range(len(self)) if self.leq[:, i].all()]
        return tops[0] if tops else None

    @property
    def bottom(self) -> int | None:
        bots = [i for i in range(len(self)) if self.leq[i, :].all()]
        return bots[0] if bots else None

    def reachable(self, a: int, b: int) -> bool:
        """Whether a directed path leads from ``a`` up to ``b`` (``a == b`` counts)."""
        seen, stack = {a}, [a]
        up = {}
        for c, p in self.edges:
            up.setdefault(c, []).append(p)
        while stack:
            u = stack.pop()
            if u == b:
                return True
            for v in up.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return False

    def label(self, i: int) -> str:
        return "0" if self.specs[i] is None else str(self.specs[i])

    def to_dict(self) -> dict:
        nodes = [{"spec": None if sp is None else sp.to_dict(), "dim": d}
                 for sp, d in zip(self.specs, self.dims)]
        return {"nodes": nodes, "edges": [list(e) for e in self.edges]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_dot(self) -> str:
        lines = ["digraph bank_lattice {", "  rankdir=BT;"]
        for i in range(len(self)):
            lines.append(f'  n{i} [label="{self.label(i)}\\ndim {self.dims[i]}"];')
        lines += [f"  n{c} -> n{p};" for c, p in self.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_lattice(specs: Sequence[BankSpec], s, tol: float = 1e-8,
                  adjoin_bottom: bool = True) -> BankLattice:
    """Transitive reduction of inclusion among ``specs``.

    ``specs`` should already be deduplicated; equal spans would otherwise
    form 2-cycles and are rejected. With ``adjoin_bottom`` the zero space is
    added as node 0 so that meets exist.
    """
    specs = list(specs)
    bases = [_orthonormal_span(sp, s, tol) for sp in specs]
    if adjoin_bottom:
        n = specs[0].n if specs else (s.n if hasattr(s, "n") else np.asarray(s).shape[0])
        specs = [None] + specs
        bases = [np.zeros((n * n, 0))] + bases
    leq = containment_matrix(bases, tol)
    m = len(specs)
    for a in range(m):
        for b in range(a + 1, m):
            if leq[a, b] and leq[b, a]:
                raise ValueError(f"nodes {specs[a]} and {specs[b]} span the same space; dedup first")
    lt = leq & ~np.eye(m, dtype=bool)
    edges = []
    for a in range(m):
        for b in range(m):
            if lt[a, b] and not np.any(lt[a, :] & lt[:, b]):
                edges.append((a, b))
    dims = tuple(B.shape[1] for B in bases)
    return BankLattice(tuple(specs), dims, tuple(edges), leq, tuple(bases), tol)


def join(lat: BankLattice, a: int, b: int) -> int | None:
    """Least node above both ``a`` and ``b``, or ``None`` if there is none."""
    ups = [u for u in range(len(lat)) if lat.leq[a, u] and lat.leq[b, u]]
    least = [u for u in ups if all(lat.leq[u, w] for w in ups)]
    return least[0] if least else None


def meet(lat: BankLattice, a: int, b: int) -> int | None:
    """Greatest node below both ``a`` and ``b``, or ``None`` if there is none."""
    downs = [u for u in range(len(lat)) if lat.leq[u, a] and lat.leq[u, b]]
    greatest = [u for u in downs if all(lat.leq[w, u] for w in downs)]
    return greatest[0] if greatest else None
