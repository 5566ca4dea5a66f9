import numpy as np
import pytest

from semishift.graph import laplacian, random_connected_graph
from semishift.spectral import generic_perturbed_laplacian

# criterion number -> list of (ok, message); filled by test_acceptance.py
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def record():
    def _record(number: int, ok: bool, message: str):
        ACCEPTANCE.setdefault(number, []).append((bool(ok), message))
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        ok = all(p for p, _ in parts)
        detail = "; ".join(m for _, m in parts)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


def random_essential_tuple(n: int, k: int, rng: np.random.Generator) -> tuple:
    """Random essential support tuple of ``k`` sets on ``range(n)`` (requires ``k <= n``)."""
    while True:
        sets = []
        for _ in range(k):
            size = int(rng.integers(1, n + 1))
            sets.append(tuple(sorted(int(v) for v in rng.choice(n, size=size, replace=False))))
        C = tuple(sets)
        covered = [set().union(*(set(W) for j, W in enumerate(C) if j != i)) for i in range(k)]
        if all(set(V) - covered[i] for i, V in enumerate(C)) and len(set(C)) == k:
            return C


def generic_instance(rng: np.random.Generator, n_lo: int = 3, n_hi: int = 8):
    """A random connected graph and a generic perturbation of its Laplacian.

    Some graphs keep a near-zero eigenvector entry under every small
    perturbation; those are redrawn.
    """
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        g = random_connected_graph(n, 0.5, rng)
        try:
            return g, generic_perturbed_laplacian(laplacian(g), rng, max_tries=50)
        except RuntimeError:
            continue
