"""Entanglement and EPR-steering criteria built on the moment bundles.

Each ratio-style criterion reports a dimensionless value with fixed
thresholds: below 1 certifies entanglement, below 1/2 certifies EPR
steering.  Witness-style criteria compare a variance combination against a
state-dependent bound.  Both carry a classification tag so sweep output can
encode the verdict as a stable integer code.

The planar-variance bound C_J for a spin-J pair is computed by minimising
the planar variance over ground states of a field-tilted planar Hamiltonian;
values are cached in a lazily extended table used by the entanglement-depth
lookup.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from math import isnan, nan, sqrt

import numpy as np
from scipy.optimize import minimize_scalar

from . import eigensolve
from .errors import TableExhausted
from .fockspace import (
    OpPoly,
    State,
    _expectation_unchecked,
    create,
    destroy,
    expectation,
)
from .hamiltonians import SymMatrix
from .observables import (
    HZMoments,
    _clamped_var,
    _pair_modes,
    _real,
    _site_spins,
    hz_moments,
    interwell_spin_stats,
    local_spin_quartics,
    rotated_pair_stats,
)

__all__ = [
    "Classification",
    "CriterionResult",
    "WitnessResult",
    "CoherenceResult",
    "CJTable",
    "e_hz",
    "e_hz_from_moments",
    "e_hz_planar",
    "e_hz_rotated",
    "e_hz_spin",
    "duan_sum_spin",
    "heisenberg_product",
    "c_j",
    "entanglement_depth",
    "order_m_coherence",
    "coherent_lo_ratio",
]

#: Ratio values below this certify entanglement.
ENTANGLED_BELOW = 1.0
#: Ratio values below this certify EPR steering.
STEERING_BELOW = 0.5

#: Largest spin the C_J table will compute before raising TableExhausted.
MAX_TABLE_SPIN = 200.0


class Classification(IntEnum):
    """Verdict of a criterion evaluation, stable across output formats."""

    SEPARABLE_CONSISTENT = 0
    ENTANGLED = 1
    EPR_STEERING = 2
    INCONCLUSIVE = 3


def _classify(value: float, conclusive: bool) -> Classification:
    if not conclusive or isnan(value):
        return Classification.INCONCLUSIVE
    if value < STEERING_BELOW:
        return Classification.EPR_STEERING
    if value < ENTANGLED_BELOW:
        return Classification.ENTANGLED
    return Classification.SEPARABLE_CONSISTENT


@dataclass(frozen=True)
class CriterionResult:
    """Ratio-style criterion value with verdict and diagnostic moments.

    ``value`` is NaN when the criterion denominator is not positive, in
    which case the classification is ``INCONCLUSIVE``.
    """

    value: float
    classification: Classification
    detail: dict[str, float] = field(default_factory=dict)
    threshold_entangled: float = ENTANGLED_BELOW
    threshold_steering: float = STEERING_BELOW


@dataclass(frozen=True)
class WitnessResult:
    """Variance witness against a state-dependent bound.

    ``passed`` means the variance combination is strictly below the bound,
    certifying entanglement.  A zero bound makes the witness inconclusive.
    """

    value: float
    bound: float
    passed: bool
    classification: Classification
    detail: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CoherenceResult:
    """Order-m cross coherence of a junction pair with a nonzero flag."""

    m: int
    value: complex
    nonzero: bool


def _ratio_result(
    numerator: float, denominator: float, detail: dict[str, float]
) -> CriterionResult:
    detail = dict(detail)
    detail["denominator"] = denominator
    if denominator > 0.0:
        value = 1.0 + numerator / denominator
    else:
        value = nan
    return CriterionResult(value, _classify(value, denominator > 0.0), detail)


def e_hz_from_moments(moments: HZMoments) -> CriterionResult:
    """Order-m coherence criterion value from a precomputed moment bundle.

    The order-1 denominator is the smaller mean occupation; higher orders
    use the smaller of the two commutator denominators.
    """
    c_abs2 = abs(moments.c) ** 2
    if moments.m == 1:
        denominator = min(moments.n_a, moments.n_b)
    else:
        denominator = min(moments.denom_a, moments.denom_b)
    detail = {
        "c_real": moments.c.real,
        "c_imag": moments.c.imag,
        "c_abs2": c_abs2,
        "q": moments.q,
        "n_a": moments.n_a,
        "n_b": moments.n_b,
        "denom_a": moments.denom_a,
        "denom_b": moments.denom_b,
    }
    return _ratio_result(moments.q - c_abs2, denominator, detail)


def e_hz(
    state: State, m: int = 1, pair: int = 0, rotated: bool = False
) -> CriterionResult:
    """Order-m coherence criterion for one junction pair of ``state``."""
    return e_hz_from_moments(hz_moments(state, m, pair, rotated))


def _planar_value(
    var_first: float, var_second: float, total: float, names: tuple[str, str]
) -> CriterionResult:
    detail = {
        names[0]: var_first,
        names[1]: var_second,
        "total": total,
    }
    return _ratio_result(var_first + var_second - total / 2.0, total / 2.0, detail)


def e_hz_planar(state: State, pair: int = 0) -> CriterionResult:
    """Planar spin-variance criterion of one junction pair.

    The value is the sum of the two planar variances in units of half the
    pair occupation, so values below 1 certify entanglement between the
    junction modes.
    """
    stats = interwell_spin_stats(state, pair)
    return _planar_value(stats.var_x, stats.var_y, stats.total, ("var_x", "var_y"))


def e_hz_rotated(state: State, pair: int = 0) -> CriterionResult:
    """Planar spin-variance criterion after the balanced mode rotation.

    The rotated planar pair corresponds to the unrotated X and Z variances,
    the pair squeezed in the repulsive regime.
    """
    stats = rotated_pair_stats(state, pair)
    return _planar_value(stats.var_x, stats.var_y, stats.total, ("var_x", "var_y"))


def e_hz_spin(state: State, rotated: bool = False) -> CriterionResult:
    """Local-spin coherence criterion between the two sites of a four-mode state.

    The ratio uses the smaller of the two commutator denominators.  The
    detail also reports the raw inequality forms: ``raw_entangled`` is 1
    when the squared cross coherence exceeds the quartic correlator, and
    ``raw_steering`` is 1 when it exceeds the lesser of the two one-sided
    steering bounds.
    """
    quartics = local_spin_quartics(state, rotated)
    cross_abs2 = abs(quartics.cross) ** 2
    steer_bound = min(quartics.steer_a, quartics.steer_a_minus)
    detail = {
        "cross_real": quartics.cross.real,
        "cross_imag": quartics.cross.imag,
        "cross_abs2": cross_abs2,
        "quartic": quartics.quartic,
        "d_a": quartics.d_a,
        "d_b": quartics.d_b,
        "steer_a": quartics.steer_a,
        "steer_a_minus": quartics.steer_a_minus,
        "raw_entangled": float(cross_abs2 > quartics.quartic),
        "raw_steering": float(cross_abs2 > steer_bound),
    }
    return _ratio_result(
        quartics.quartic - cross_abs2, min(quartics.d_a, quartics.d_b), detail
    )


def _require_four_modes(state: State, what: str) -> None:
    if state.basis.n_modes != 4:
        raise ValueError(f"{what} needs a four-mode state")


def _site_components(state: State) -> tuple[OpPoly, ...]:
    jp_a, jm_a, jz_a, jp_b, jm_b, jz_b = _site_spins(state.basis, rotated=False)
    jx_a = 0.5 * (jp_a + jm_a)
    jy_a = -0.5j * (jp_a - jm_a)
    jx_b = 0.5 * (jp_b + jm_b)
    jy_b = -0.5j * (jp_b - jm_b)
    return jx_a, jy_a, jz_a, jx_b, jy_b, jz_b


def _variance(state: State, op: OpPoly) -> float:
    # site-spin components need the literal path: their sector-violating
    # terms have exactly zero expectation on fixed-total states
    mean = _real(_expectation_unchecked(state, op))
    second = _real(_expectation_unchecked(state, op * op))
    return _clamped_var(second - mean * mean)


def duan_sum_spin(state: State) -> WitnessResult:
    """Sum-variance witness on the local site spins of a four-mode state.

    Both relative sign pairings of the planar components are tried and the
    smaller variance sum is compared against the sum of the absolute mean
    site polarisations.
    """
    _require_four_modes(state, "the sum-variance spin witness")
    jx_a, jy_a, jz_a, jx_b, jy_b, jz_b = _site_components(state)
    lhs_minus = _variance(state, jx_a - jx_b) + _variance(state, jy_a + jy_b)
    lhs_plus = _variance(state, jx_a + jx_b) + _variance(state, jy_a - jy_b)
    bound = abs(_real(_expectation_unchecked(state, jz_a))) + abs(
        _real(_expectation_unchecked(state, jz_b))
    )
    value = min(lhs_minus, lhs_plus)
    conclusive = bound > 0.0
    passed = conclusive and value < bound
    if not conclusive:
        classification = Classification.INCONCLUSIVE
    elif passed:
        classification = Classification.ENTANGLED
    else:
        classification = Classification.SEPARABLE_CONSISTENT
    detail = {
        "lhs_minus": lhs_minus,
        "lhs_plus": lhs_plus,
        "bound": bound,
    }
    return WitnessResult(value, bound, passed, classification, detail)


def _symmetrized_covariances(
    state: State, ops: tuple[OpPoly, ...]
) -> tuple[np.ndarray, np.ndarray]:
    n = len(ops)
    means = np.array([_real(_expectation_unchecked(state, op)) for op in ops])
    cov = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            sym = 0.5 * _real(
                _expectation_unchecked(state, ops[i] * ops[j] + ops[j] * ops[i])
            )
            cov[i, j] = cov[j, i] = sym - means[i] * means[j]
    return means, cov


def heisenberg_product(state: State, grid_points: int = 180) -> WitnessResult:
    """Product-variance witness on the local site spins of a four-mode state.

    For each angle in a uniform grid over half a turn the X and Z site
    components are mixed into a tilted component and its orthogonal
    partner; the witness value is the minimum over angles of the geometric
    mean of the difference and sum variances, compared against half the
    summed absolute Y polarisations.
    """
    _require_four_modes(state, "the product-variance spin witness")
    if grid_points < 1:
        raise ValueError("grid_points must be positive")
    jx_a, jy_a, jz_a, jx_b, jy_b, jz_b = _site_components(state)
    means, cov = _symmetrized_covariances(state, (jx_a, jz_a, jx_b, jz_b))

    def tilted_var(theta: float) -> tuple[float, float]:
        c, s = np.cos(theta), np.sin(theta)
        # difference of tilted components, sum of the orthogonal ones
        w_diff = np.array([c, s, -c, -s])
        w_sum = np.array([-s, c, -s, c])
        var_diff = _clamped_var(float(w_diff @ cov @ w_diff))
        var_sum = _clamped_var(float(w_sum @ cov @ w_sum))
        return var_diff, var_sum

    best = nan
    best_theta = 0.0
    best_pair = (nan, nan)
    for k in range(grid_points):
        theta = np.pi * k / grid_points
        var_diff, var_sum = tilted_var(theta)
        product = sqrt(var_diff * var_sum)
        if isnan(best) or product < best:
            best = product
            best_theta = theta
            best_pair = (var_diff, var_sum)
    bound = 0.5 * (
        abs(_real(_expectation_unchecked(state, jy_a)))
        + abs(_real(_expectation_unchecked(state, jy_b)))
    )
    conclusive = bound > 0.0
    passed = conclusive and best < bound
    if not conclusive:
        classification = Classification.INCONCLUSIVE
    elif passed:
        classification = Classification.ENTANGLED
    else:
        classification = Classification.SEPARABLE_CONSISTENT
    detail = {
        "theta": best_theta,
        "var_diff": best_pair[0],
        "var_sum": best_pair[1],
        "bound": bound,
    }
    return WitnessResult(best, bound, passed, classification, detail)


def _planar_floor_matrix(twoj: int, lam: float) -> SymMatrix:
    """Field-tilted planar Hamiltonian of a single spin in the Z basis."""
    j = twoj / 2.0
    m_values = np.arange(-j, j + 0.5)
    low = np.zeros((twoj + 1, twoj + 1))
    np.fill_diagonal(low, j * (j + 1) - m_values**2)
    raising = 0.5 * np.sqrt(j * (j + 1) - m_values[:-1] * (m_values[:-1] + 1))
    low[np.arange(1, twoj + 1), np.arange(twoj)] = -lam * raising
    return SymMatrix(low)


def _planar_variance_at(twoj: int, lam: float) -> float:
    j = twoj / 2.0
    ground = eigensolve.ground_state(_planar_floor_matrix(twoj, lam))
    v = ground.vector.real
    m_values = np.arange(-j, j + 0.5)
    planar_sq = float(np.sum(v**2 * (j * (j + 1) - m_values**2)))
    raising = 0.5 * np.sqrt(j * (j + 1) - m_values[:-1] * (m_values[:-1] + 1))
    mean_x = float(2.0 * np.sum(v[1:] * v[:-1] * raising))
    # the Y mean vanishes for a real ground vector
    return planar_sq - mean_x**2


def c_j(j: float) -> float:
    """Minimum planar spin variance attainable by a spin-j ground family.

    Scans the tilt strength with a coarse grid and refines the best bracket
    with a bounded scalar minimiser.  For j = 1/2 the variance is constant
    at 1/4.
    """
    twoj = round(2 * j)
    if abs(2 * j - twoj) > 1e-9 or twoj < 1:
        raise ValueError("j must be a positive integer or half-integer")
    lam_max = 2.0 * j + 2.0
    grid = np.linspace(lam_max / 41.0, lam_max, 41)
    values = [_planar_variance_at(twoj, lam) for lam in grid]
    best = int(np.argmin(values))
    lo = grid[best - 1] if best > 0 else grid[0] / 2.0
    hi = grid[best + 1] if best + 1 < len(grid) else lam_max
    refined = minimize_scalar(
        lambda lam: _planar_variance_at(twoj, lam),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-8},
    )
    return float(min(min(values), refined.fun))


class CJTable:
    """Lazily extended cache of planar-variance floors keyed by twice the spin."""

    def __init__(self, max_spin: float = MAX_TABLE_SPIN):
        self.max_spin = max_spin
        self._values: dict[int, float] = {}

    def value(self, j: float) -> float:
        """C_J for spin ``j``, computing and caching it on first use."""
        twoj = round(2 * j)
        if twoj / 2.0 > self.max_spin:
            raise TableExhausted(
                f"planar floor table capped at spin {self.max_spin}"
            )
        if twoj not in self._values:
            self._values[twoj] = c_j(twoj / 2.0)
        return self._values[twoj]


_SHARED_TABLE = CJTable()


def entanglement_depth(e_value: float, table: CJTable | None = None) -> int:
    """Largest certified number of mutually entangled particles.

    Returns the largest group size whose normalised planar floor still
    exceeds the observed planar criterion value, or 0 when the value does
    not certify entanglement at all.  Raises TableExhausted when the value
    lies below every floor the table can provide.
    """
    if table is None:
        table = _SHARED_TABLE
    if e_value >= 0.5:
        return 0
    depth = 0
    n_groups = 1
    while True:
        spin = n_groups / 2.0
        if spin > table.max_spin:
            raise TableExhausted(
                f"value {e_value} below every floor up to spin {table.max_spin}"
            )
        if e_value < table.value(spin) / spin:
            depth = n_groups
            n_groups += 1
        else:
            return depth


def order_m_coherence(state: State, m: int, pair: int = 0) -> CoherenceResult:
    """Order-m cross coherence of one junction pair.

    The flag marks magnitudes above 1e-10, the working resolution of the
    sector engine.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    mode_a, mode_b = _pair_modes(state.basis, pair)
    value = complex(expectation(state, destroy(mode_a, m) * create(mode_b, m)))
    return CoherenceResult(m, value, abs(value) > 1e-10)


def coherent_lo_ratio(moments: HZMoments, alpha: float) -> CriterionResult:
    """Order-1 criterion as resolved by homodyning against a coherent reference.

    ``alpha`` is the reference amplitude mixed with each junction mode; the
    moments must be an order-1 bundle.  A zero amplitude leaves the
    quadrature readout blind to the coherence, so the result is
    inconclusive.
    """
    if moments.m != 1:
        raise ValueError("the homodyne ratio needs order-1 moments")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    c_abs2 = abs(moments.c) ** 2
    denominator = min(moments.n_a, moments.n_b)
    scale = (1.0 + alpha**2) ** 2
    detail = {
        "alpha": alpha,
        "c_abs2": c_abs2,
        "q": moments.q,
        "n_a": moments.n_a,
        "n_b": moments.n_b,
    }
    if alpha == 0.0:
        detail["denominator"] = denominator
        return CriterionResult(nan, Classification.INCONCLUSIVE, detail)
    return _ratio_result(
        moments.q - c_abs2 * alpha**4 / scale, denominator, detail
    )
