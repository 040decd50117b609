"""Sector Hamiltonians for one or two tunnel-coupled bosonic junctions.

The two-mode junction is ``kappa (a†b + a b†) + (g/2)(a†a†aa + b†b†bb)``.
The four-mode system couples two such junctions through an interspecies
density-density term ``g12 (n_a1 n_a2 + n_b1 n_b2)`` acting within each well.
Both Hamiltonians conserve the pair totals, so they are built directly in the
fixed-number sector bases of :mod:`twinwell.fockspace`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from .errors import BasisMismatch
from .fockspace import FockBasis, enumerate_four_mode, enumerate_two_mode

__all__ = [
    "TwoModeParams",
    "FourModeParams",
    "SymMatrix",
    "build_two_mode",
    "build_four_mode",
    "effective_chi",
]


def _check_total(name: str, value: int) -> None:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")


def _check_real(name: str, value: float) -> None:
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class TwoModeParams:
    """Couplings of a single junction: tunneling kappa, on-site interaction g,
    fixed total occupation."""

    kappa: float
    g: float
    total: int

    def __post_init__(self) -> None:
        _check_real("kappa", self.kappa)
        _check_real("g", self.g)
        _check_total("total", self.total)


@dataclass(frozen=True)
class FourModeParams:
    """Couplings of two junctions sharing the wells.

    ``g11`` and ``g22`` are the intraspecies interactions, ``g12`` the
    interspecies one; ``total1`` and ``total2`` fix the species numbers.
    """

    kappa1: float
    kappa2: float
    g11: float
    g12: float
    g22: float
    total1: int
    total2: int

    def __post_init__(self) -> None:
        for name in ("kappa1", "kappa2", "g11", "g12", "g22"):
            _check_real(name, getattr(self, name))
        _check_total("total1", self.total1)
        _check_total("total2", self.total2)


class SymMatrix:
    """Real symmetric matrix stored as its dense lower triangle.

    Optionally carries the Fock basis it was built over; combining matrices
    over different bases raises BasisMismatch.
    """

    __slots__ = ("low", "basis")

    def __init__(self, low: np.ndarray, basis: FockBasis | None = None):
        low = np.asarray(low, dtype=np.float64)
        if low.ndim != 2 or low.shape[0] != low.shape[1]:
            raise ValueError(f"expected a square array, got shape {low.shape}")
        if np.any(np.triu(low, k=1) != 0):
            raise ValueError("upper triangle must be zero")
        self.low = low
        self.basis = basis

    @classmethod
    def from_dense(
        cls, a: np.ndarray, basis: FockBasis | None = None
    ) -> "SymMatrix":
        a = np.asarray(a, dtype=np.float64)
        if not np.allclose(a, a.T, atol=1e-13 * max(1.0, np.abs(a).max())):
            raise ValueError("matrix is not symmetric")
        return cls(np.tril(a), basis)

    @property
    def dim(self) -> int:
        return self.low.shape[0]

    def dense(self) -> np.ndarray:
        """Full symmetric matrix."""
        return self.low + np.tril(self.low, k=-1).T

    def to_sparse(self) -> scipy.sparse.csr_matrix:
        """Sparse view of the full symmetric matrix."""
        lower = scipy.sparse.csr_matrix(self.low)
        strict = scipy.sparse.tril(lower, k=-1)
        return (lower + strict.T).tocsr()

    def max_row_norm(self) -> float:
        """Infinity norm, used as the scale for residual and gap thresholds."""
        return float(np.abs(self.dense()).sum(axis=1).max()) if self.dim else 0.0

    def _check_same_basis(self, other: "SymMatrix") -> None:
        if self.basis is None or other.basis is None:
            if self.dim != other.dim:
                raise BasisMismatch("matrix dimensions differ")
            return
        if self.basis != other.basis:
            raise BasisMismatch(
                f"bases differ: {self.basis.describe()} vs "
                f"{other.basis.describe()}"
            )

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        if not isinstance(other, SymMatrix):
            return NotImplemented
        self._check_same_basis(other)
        return SymMatrix(self.low + other.low, self.basis or other.basis)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        if not isinstance(other, SymMatrix):
            return NotImplemented
        self._check_same_basis(other)
        return SymMatrix(self.low - other.low, self.basis or other.basis)

    def __mul__(self, scalar: float) -> "SymMatrix":
        if not isinstance(scalar, (int, float, np.floating, np.integer)):
            return NotImplemented
        return SymMatrix(self.low * float(scalar), self.basis)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        tag = f", basis={self.basis.describe()}" if self.basis else ""
        return f"SymMatrix(dim={self.dim}{tag})"


def _pair_interaction(n: np.ndarray, total: int, g: float) -> np.ndarray:
    """(g/2) [n(n-1) + (total-n)(total-n-1)] elementwise."""
    m = total - n
    return 0.5 * g * (n * (n - 1.0) + m * (m - 1.0))


def build_two_mode(params: TwoModeParams) -> SymMatrix:
    """Junction Hamiltonian in the |n, total-n> basis.

    Diagonal: the on-site interaction.  First subdiagonal:
    kappa * sqrt((n+1)(total-n)) connecting n and n+1.
    """
    basis = enumerate_two_mode(params.total)
    n = np.arange(params.total + 1, dtype=np.float64)
    low = np.zeros((basis.dim, basis.dim))
    low[np.diag_indices(basis.dim)] = _pair_interaction(
        n, params.total, params.g
    )
    hop = params.kappa * np.sqrt((n[:-1] + 1.0) * (params.total - n[:-1]))
    low[np.arange(1, basis.dim), np.arange(basis.dim - 1)] = hop
    return SymMatrix(low, basis)


def build_four_mode(params: FourModeParams) -> SymMatrix:
    """Two-junction Hamiltonian in the product sector basis.

    Tunneling acts per junction; interactions are diagonal, including the
    interspecies terms g12 (n_a1 n_a2 + n_b1 n_b2) within each well.
    """
    basis = enumerate_four_mode(params.total1, params.total2)
    occ = basis.occ_array.astype(np.float64)
    na1, nb1, na2, nb2 = occ.T
    low = np.zeros((basis.dim, basis.dim))
    diag = (
        _pair_interaction(na1, params.total1, params.g11)
        + _pair_interaction(na2, params.total2, params.g22)
        + params.g12 * (na1 * na2 + nb1 * nb2)
    )
    low[np.diag_indices(basis.dim)] = diag

    ranks = np.arange(basis.dim)
    stride1 = params.total2 + 1
    # junction 1: |n1+1, n2> <-> |n1, n2>, rank step total2+1
    src = ranks[na1 < params.total1]
    hop1 = params.kappa1 * np.sqrt(
        (na1[src] + 1.0) * (params.total1 - na1[src])
    )
    low[src + stride1, src] = hop1
    # junction 2: |n1, n2+1> <-> |n1, n2>, rank step 1
    src = ranks[na2 < params.total2]
    hop2 = params.kappa2 * np.sqrt(
        (na2[src] + 1.0) * (params.total2 - na2[src])
    )
    low[src + 1, src] = hop2
    return SymMatrix(low, basis)


def effective_chi(params: FourModeParams) -> float:
    """Effective one-axis-twisting strength (g11 + g22 - 2 g12) / 2 of the
    junction-difference spin."""
    return 0.5 * (params.g11 + params.g22 - 2.0 * params.g12)
