"""Graph shift operators, their spectra, genericity checks and the GFT."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

KINDS = ("adjacency", "laplacian", "normalized_adjacency", "normalized_laplacian", "custom")


class NonNormalShiftError(ValueError):
    """Raised when a candidate shift operator is not a normal matrix."""

    def __init__(self, defect: float):
        self.defect = defect
        super().__init__(f"gso-not-normal (||S S^T - S^T S||_F = {defect:.3e})")


@dataclass(frozen=True, eq=False)
class ShiftOperator:
    """A normal shift matrix together with its unitary eigendecomposition.

    ``S == U @ diag(eigenvalues) @ U.conj().T``. Symmetric inputs keep a real
    orthogonal ``U``; other normal matrices get a complex one from the
    Schur form.
    """

    S: np.ndarray
    kind: str
    eigenvalues: np.ndarray
    U: np.ndarray

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @property
    def is_symmetric(self) -> bool:
        return not np.iscomplexobj(self.U)


def build_shift(matrix, kind: str = "custom", tol: float = 1e-8) -> ShiftOperator:
    S = np.array(matrix, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"shift operator must be square, got shape {S.shape}")
    if kind not in KINDS:
        raise ValueError(f"unknown shift kind {kind!r}")
    scale = np.linalg.norm(S) ** 2
    defect = np.linalg.norm(S @ S.T - S.T @ S)
    if defect > tol * max(scale, np.finfo(float).tiny):
        raise NonNormalShiftError(defect)
    S.setflags(write=False)
    if np.array_equal(S, S.T):
        lam, U = np.linalg.eigh(S)
    else:
        T, U = la.schur(S.astype(complex), output="complex")
        lam = np.diag(T).copy()
        off = np.linalg.norm(T - np.diag(lam))
        if off > np.sqrt(tol) * max(np.linalg.norm(S), 1.0):
            raise NonNormalShiftError(off)
    return ShiftOperator(S, kind, lam, U)


@dataclass(frozen=True)
class GenericityReport:
    distinct_eigenvalues: bool
    min_eigenvalue_gap: float
    nonzero_eigenvector_entries: bool
    min_eigenvector_entry: float
    tol: float

    @property
    def generic(self) -> bool:
        return self.distinct_eigenvalues and self.nonzero_eigenvector_entries


def genericity_check(s: ShiftOperator, tol: float | None = None) -> GenericityReport:
    """Check that the spectrum is simple and no eigenvector has a zero entry.

    The default tolerance is ``1e-8 * max|lambda|``; it is applied both to the
    smallest pairwise eigenvalue gap and to the smallest ``|U[j, i]|``.
    """
    lam = s.eigenvalues
    if tol is None:
        tol = 1e-8 * max(np.abs(lam).max(initial=0.0), 1e-300)
    if lam.size > 1:
        gaps = np.abs(lam[:, None] - lam[None, :])
        gap = float(gaps[~np.eye(lam.size, dtype=bool)].min())
    else:
        gap = np.inf
    entry = float(np.abs(s.U).min()) if s.U.size else np.inf
    return GenericityReport(gap > tol, gap, entry > tol, entry, float(tol))


def gft(s: ShiftOperator, f) -> np.ndarray:
    f = np.asarray(f)
    if f.shape[0] != s.n:
        raise ValueError(f"signal has {f.shape[0]} entries, graph has {s.n} vertices")
    return s.U.conj().T @ f


def igft(s: ShiftOperator, fhat) -> np.ndarray:
    fhat = np.asarray(fhat)
    if fhat.shape[0] != s.n:
        raise ValueError(f"spectrum has {fhat.shape[0]} entries, graph has {s.n} vertices")
    return s.U @ fhat


def random_signal_gft(s: ShiftOperator, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Signal(s) whose GFT coefficients are i.i.d. Uniform[0, 1].

    With ``size`` given, returns an ``n x size`` array of independent signals.
    """
    if not s.is_symmetric:
        raise ValueError("random_signal_gft needs a real Fourier basis (symmetric shift)")
    c = rng.uniform(0.0, 1.0, s.n if size is None else (s.n, size))
    return s.U @ c


def perturbed_laplacian(L: np.ndarray, rng: np.random.Generator, scale: float = 1e-3) -> np.ndarray:
    """``L + diag(u)`` with ``u ~ Uniform[0, scale]``; breaks spectral symmetries."""
    return L + np.diag(rng.uniform(0.0, scale, L.shape[0]))


def generic_perturbed_laplacian(L: np.ndarray, rng: np.random.Generator, scale: float = 1e-3,
                                tol: float | None = None, max_tries: int = 1000) -> ShiftOperator:
    """Redraw :func:`perturbed_laplacian` until it passes :func:`genericity_check`.

    ``tol`` is the absolute margin demanded of eigenvalue gaps and
    eigenvector entries (``None``: the check's default).
    """
    for _ in range(max_tries):
        s = build_shift(perturbed_laplacian(L, rng, scale), "laplacian")
        if genericity_check(s, tol).generic:
            return s
    raise RuntimeError(f"no generic perturbation found in {max_tries} draws")
