"""State constructors: junction ground states, canonical thermal mixtures,
and the analytic split-Fock (balanced beam splitter) states.

Temperatures are in units of kappa with k_B = 1.  Split-state coefficients
are binomial square roots accumulated in log space so totals up to a few
hundred stay overflow-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log

import numpy as np

from .eigensolve import Spectrum, eig_full, ground_state
from .fockspace import MixedState, PureState, enumerate_four_mode, enumerate_two_mode
from .hamiltonians import (
    FourModeParams,
    SymMatrix,
    TwoModeParams,
    build_four_mode,
    build_two_mode,
)

__all__ = [
    "ThermalSpec",
    "ground_two_mode",
    "ground_four_mode",
    "thermal_state",
    "bs_single_fock",
    "bs_double_fock",
    "bs_four_mode",
]

_LN2 = log(2.0)


@dataclass(frozen=True)
class ThermalSpec:
    """Canonical-ensemble request: junction couplings plus temperature
    (units of kappa, k_B = 1).  Temperature 0 means the exact ground state."""

    params: TwoModeParams | FourModeParams
    temperature: float

    def __post_init__(self) -> None:
        if not (self.temperature >= 0):
            raise ValueError(
                f"temperature must be >= 0, got {self.temperature!r}"
            )


def _build(params: TwoModeParams | FourModeParams) -> SymMatrix:
    if isinstance(params, TwoModeParams):
        return build_two_mode(params)
    if isinstance(params, FourModeParams):
        return build_four_mode(params)
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def ground_two_mode(p: TwoModeParams) -> PureState:
    """Ground state of the single-junction Hamiltonian."""
    h = build_two_mode(p)
    return PureState(h.basis, ground_state(h).vector.astype(np.complex128))


def ground_four_mode(p: FourModeParams) -> PureState:
    """Ground state of the two-junction Hamiltonian."""
    h = build_four_mode(p)
    return PureState(h.basis, ground_state(h).vector.astype(np.complex128))


def thermal_state(spec: ThermalSpec, spectrum: Spectrum | None = None) -> MixedState:
    """Canonical ensemble exp(-H/T)/Z over the full sector spectrum.

    Weights are computed from energies shifted by the ground energy, so no
    exponential overflows.  Temperature 0 returns the ground state as a
    one-component mixture.  A precomputed spectrum of the same Hamiltonian
    may be passed to avoid rediagonalizing.
    """
    h = _build(spec.params)
    if spec.temperature == 0:
        if spectrum is None:
            g = ground_state(h)
            vector = g.vector
        else:
            vector = spectrum.vectors[:, 0]
        comp = PureState(h.basis, vector.astype(np.complex128))
        return MixedState(h.basis, np.array([1.0]), (comp,))
    if spectrum is None:
        spectrum = eig_full(h)
    shifted = spectrum.values - spectrum.values[0]
    weights = np.exp(-shifted / spec.temperature)
    weights /= weights.sum()
    # components whose weight underflowed to zero contribute exactly nothing
    keep = np.flatnonzero(weights > 0.0)
    components = tuple(
        PureState(h.basis, np.array(spectrum.vectors[:, i], dtype=np.complex128))
        for i in keep
    )
    return MixedState(h.basis, weights[keep] / weights[keep].sum(), components)


def _binomial_sqrt(total: int) -> np.ndarray:
    """c_n = sqrt(total! / (2^total n! (total-n)!)) for n = 0..total."""
    n = np.arange(total + 1)
    ln_c = 0.5 * (
        lgamma(total + 1)
        - total * _LN2
        - np.array([lgamma(k + 1) for k in n])
        - np.array([lgamma(total - k + 1) for k in n])
    )
    return np.exp(ln_c)


def bs_single_fock(total: int) -> PureState:
    """Fock state |total> split on a balanced beam splitter.

    The output is the binomial superposition sum_n c_n |n, total-n> with
    c_n the square-rooted binomial weights.
    """
    if total < 0:
        raise ValueError("total must be >= 0")
    basis = enumerate_two_mode(total)
    return PureState(basis, _binomial_sqrt(total).astype(np.complex128))


def bs_double_fock(total: int) -> PureState:
    """Twin Fock state |total, total> after interference and an exchange.

    Lives in the 2*total sector with support on even occupations only:
    sum_n c_n |2n, 2(total-n)> with alternating-sign coefficients.
    """
    if total < 0:
        raise ValueError("total must be >= 0")
    basis = enumerate_two_mode(2 * total)
    amps = np.zeros(basis.dim, dtype=np.complex128)
    for n in range(total + 1):
        ln_c = (
            0.5 * lgamma(2 * n + 1)
            + 0.5 * lgamma(2 * (total - n) + 1)
            - total * _LN2
            - lgamma(n + 1)
            - lgamma(total - n + 1)
        )
        sign = -1.0 if (total - n) % 2 else 1.0
        amps[basis.index((2 * n, 2 * (total - n)))] = sign * np.exp(ln_c)
    return PureState(basis, amps)


def bs_four_mode(total1: int, total2: int) -> PureState:
    """Two Fock states split on the same pair of balanced beam splitters.

    Product of two independent binomial splits on the four-mode sector.
    """
    if total1 < 0 or total2 < 0:
        raise ValueError("totals must be >= 0")
    basis = enumerate_four_mode(total1, total2)
    amps = np.outer(_binomial_sqrt(total1), _binomial_sqrt(total2)).ravel()
    return PureState(basis, amps.astype(np.complex128))
