"""Deterministic symmetric eigensolvers behind the package's matrix type.

``eig_full`` returns the complete orthonormal eigendecomposition (ascending
eigenvalues) with a computed residual bound.  ``ground_state`` returns the
lowest eigenpair plus the spectral gap; small problems go through the dense
solver, larger ones through Lanczos with full reorthogonalization.  Both
solvers are deterministic: repeated calls on equal input give bitwise equal
output (the Lanczos start vector comes from a fixed-seed generator).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure
from .hamiltonians import SymMatrix

__all__ = ["Spectrum", "GroundResult", "eig_full", "ground_state"]

# dimension above which ground_state switches from dense to Lanczos
DENSE_LIMIT = 500

# relative threshold below which the lowest gap counts as degenerate
DEGENERACY_RTOL = 1e-9

_LANCZOS_SEED = 174503


@dataclass(frozen=True)
class Spectrum:
    """Complete eigendecomposition: ascending values, orthonormal column
    vectors, and a computed bound on max_i ||H v_i - lambda_i v_i||."""

    values: np.ndarray
    vectors: np.ndarray
    residual_bound: float


@dataclass(frozen=True)
class GroundResult:
    """Lowest eigenpair with the gap to the next level.

    ``degenerate`` flags a gap below DEGENERACY_RTOL times the matrix scale.
    The vector's phase is fixed: the first entry of largest magnitude is
    real positive.
    """

    energy: float
    vector: np.ndarray
    gap: float
    degenerate: bool


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    if v[k] < 0:
        return -v
    return v


def eig_full(h: SymMatrix) -> Spectrum:
    """Full spectrum of a symmetric matrix, eigenvalues ascending."""
    a = h.dense()
    try:
        values, vectors = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"dense eigensolve failed: {exc}") from exc
    resid = a @ vectors - vectors * values
    residual_bound = float(np.linalg.norm(resid, axis=0).max()) if h.dim else 0.0
    values.setflags(write=False)
    vectors.setflags(write=False)
    return Spectrum(values, vectors, residual_bound)


def _lanczos_lowest_two(
    h: SymMatrix, tol: float
) -> tuple[float, float, np.ndarray]:
    """Lowest two eigenvalues and the ground vector via Lanczos with full
    reorthogonalization.  Stops when the Ritz residual bounds of both lowest
    pairs fall below ``tol``; the Krylov space is exhausted at dim steps."""
    a = h.to_sparse()
    dim = h.dim
    max_steps = min(dim, 10 * dim)
    rng = np.random.default_rng(_LANCZOS_SEED)
    q = rng.standard_normal(dim)
    q /= np.linalg.norm(q)

    cap = 64
    basis = np.zeros((dim, cap))
    basis[:, 0] = q
    alphas: list[float] = []
    betas: list[float] = []
    exhausted = False

    for j in range(max_steps):
        w = a @ basis[:, j]
        alphas.append(float(basis[:, j] @ w))
        # full reorthogonalization, applied twice for stability
        for _ in range(2):
            w -= basis[:, : j + 1] @ (basis[:, : j + 1].T @ w)
        beta = float(np.linalg.norm(w))
        if j >= 1:
            evals, evecs = scipy.linalg.eigh_tridiagonal(
                np.asarray(alphas),
                np.asarray(betas),
                select="i",
                select_range=(0, 1),
            )
            # standard Ritz residual bound |beta * last component|
            bounds = beta * np.abs(evecs[-1, :])
            if np.all(bounds <= tol):
                ground = _fix_phase(basis[:, : j + 1] @ evecs[:, 0])
                ground /= np.linalg.norm(ground)
                return float(evals[0]), float(evals[1]), ground
        if beta <= tol * 1e-3 or j == max_steps - 1:
            exhausted = True
            break
        betas.append(beta)
        if j + 1 >= cap:
            cap = min(max_steps, 2 * cap)
            grown = np.zeros((dim, cap))
            grown[:, : j + 1] = basis[:, : j + 1]
            basis = grown
        basis[:, j + 1] = w / beta

    if exhausted and len(alphas) >= 2:
        # invariant subspace: the tridiagonal spectrum is exact on it
        evals, evecs = scipy.linalg.eigh_tridiagonal(
            np.asarray(alphas),
            np.asarray(betas),
            select="i",
            select_range=(0, 1),
        )
        k = len(alphas)
        ground = _fix_phase(basis[:, :k] @ evecs[:, 0])
        ground /= np.linalg.norm(ground)
        return float(evals[0]), float(evals[1]), ground
    raise ConvergenceFailure(
        f"Lanczos did not reach tolerance {tol:g} within {max_steps} steps"
    )


def ground_state(h: SymMatrix) -> GroundResult:
    """Lowest eigenpair of a symmetric matrix.

    Dense solve up to dim DENSE_LIMIT, Lanczos with full reorthogonalization
    above.  Raises ConvergenceFailure if the iteration stalls or the computed
    pair fails its residual check.
    """
    if h.dim == 0:
        raise ValueError("empty matrix has no ground state")
    scale = h.max_row_norm()
    if h.dim == 1:
        return GroundResult(float(h.low[0, 0]), np.ones(1), np.inf, False)
    if h.dim <= DENSE_LIMIT:
        spec = eig_full(h)
        energy = float(spec.values[0])
        gap = float(spec.values[1] - spec.values[0])
        vector = _fix_phase(np.array(spec.vectors[:, 0]))
    else:
        tol = 1e-11 * max(scale, 1e-300)
        energy, second, vector = _lanczos_lowest_two(h, tol)
        gap = second - energy
        resid = float(np.linalg.norm(h.to_sparse() @ vector - energy * vector))
        if resid > 1e-9 * max(scale, 1e-300):
            raise ConvergenceFailure(
                f"ground pair residual {resid:g} exceeds tolerance"
            )
    vector.setflags(write=False)
    degenerate = bool(gap < DEGENERACY_RTOL * scale)
    return GroundResult(energy, vector, gap, degenerate)
