"""Moment bundles consumed by the entanglement criteria.

Everything here is a pure function from a state to numbers: mode-moment
bundles to arbitrary order, inter-well Schwinger spin statistics (plain or
for rotated modes), local intra-well spin quartics for the four-mode system,
variance-ellipsoid data, the interferometric quadrature sum, and the reduced
entropy of a pure split state.

Spin operators are assembled symbolically from ladder polynomials and
evaluated with the sector engine, so rotated-mode variants reuse the exact
same code path with transformed mode operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .fockspace import (
    FockBasis,
    LadderString,
    MixedState,
    OpPoly,
    PureState,
    State,
    _expectation_unchecked,
    create,
    destroy,
    expectation,
)

__all__ = [
    "HZMoments",
    "SpinStats",
    "SpinQuartics",
    "hz_moments",
    "interwell_spin_stats",
    "rotated_pair_stats",
    "local_spin_quartics",
    "ellipsoid",
    "quadrature_D",
    "reduced_entropy",
]


@dataclass(frozen=True)
class HZMoments:
    """Order-m mode moments of one junction pair.

    ``c`` is the coherence <a^m (b†)^m>, ``q`` the density correlator
    <(a†)^m a^m (b†)^m b^m>, and ``denom_a``/``denom_b`` the two commutator
    denominators of the order-m criterion.  ``n_a``/``n_b`` are the mean
    occupations.
    """

    m: int
    c: complex
    q: float
    denom_a: float
    denom_b: float
    n_a: float
    n_b: float


@dataclass(frozen=True)
class SpinStats:
    """Means and variances of a Schwinger spin triple, plus the pair total."""

    mean_x: float
    mean_y: float
    mean_z: float
    var_x: float
    var_y: float
    var_z: float
    total: float


@dataclass(frozen=True)
class SpinQuartics:
    """Local-spin moments of the four-mode system.

    ``cross`` is <J_A+ J_B->, ``quartic`` <J_A+ J_A- J_B+ J_B->, ``d_a`` and
    ``d_b`` the commutator denominators 2<J_A^Z J_B+ J_B-> and
    2<J_A+ J_A- J_B^Z>, and ``steer_a``/``steer_a_minus`` the steering
    denominators with +J_A^Z and -J_A^Z.
    """

    cross: complex
    quartic: float
    d_a: float
    d_b: float
    steer_a: float
    steer_a_minus: float


def _clamped_var(raw: float) -> float:
    if raw < -1e-9:
        raise AssertionError(f"variance {raw!r} below the -1e-9 guard")
    return 0.0 if raw < 0.0 else raw


def _real(value: complex) -> float:
    return float(np.real(value))


def _pair_modes(basis: FockBasis, pair: int) -> tuple[int, int]:
    if basis.n_modes == 2:
        if pair != 0:
            raise ValueError("a two-mode state has only pair 0")
        return 0, 1
    if basis.n_modes == 4:
        if pair == 0:
            return 0, 1
        if pair == 1:
            return 2, 3
        raise ValueError("pair must be 0 or 1")
    raise ValueError(f"unsupported basis with {basis.n_modes} modes")


def _mode_polys(
    mode_a: int, mode_b: int, rotated: bool
) -> tuple[OpPoly, OpPoly]:
    """Annihilator polynomials of a junction pair, plain or rotated.

    The rotation is a' = (a + i b)/sqrt(2), b' = (a - i b)/sqrt(2); its spin
    triple is a relabeling of the original axes, with the primed planar pair
    mapping onto the original X and Z components.
    """
    a = OpPoly.from_string(destroy(mode_a))
    b = OpPoly.from_string(destroy(mode_b))
    if not rotated:
        return a, b
    s = 1.0 / sqrt(2.0)
    return s * (a + 1j * b), s * (a - 1j * b)


def _num(p: OpPoly) -> OpPoly:
    return p.dagger() * p


def _spin_triple(a: OpPoly, b: OpPoly) -> tuple[OpPoly, OpPoly, OpPoly]:
    """J_X, J_Y, J_Z of the Schwinger spin built on two annihilators."""
    jp = a.dagger() * b
    jm = jp.dagger()
    jx = 0.5 * (jp + jm)
    jy = -0.5j * (jp - jm)
    jz = 0.5 * (_num(a) - _num(b))
    return jx, jy, jz


def _stats(state: State, a: OpPoly, b: OpPoly) -> SpinStats:
    jx, jy, jz = _spin_triple(a, b)
    total = _real(expectation(state, _num(a) + _num(b)))
    means = []
    variances = []
    for op in (jx, jy, jz):
        mean = _real(expectation(state, op))
        second = _real(expectation(state, op * op))
        means.append(mean)
        variances.append(_clamped_var(second - mean * mean))
    return SpinStats(*means, *variances, total)


def _poly_pow(p: OpPoly, m: int) -> OpPoly:
    out = p
    for _ in range(m - 1):
        out = out * p
    return out


def hz_moments(
    state: State, m: int, pair: int = 0, rotated: bool = False
) -> HZMoments:
    """Order-m moment bundle of one junction pair, plain or rotated.

    Orders beyond the sector total give exact zeros for every moment (all
    ladder paths annihilate); m < 1 is an error.  The rotated bundle uses
    the balanced mode rotation; the rotated modes commute, so the operator
    orderings match the plain case term by term.
    """
    if m < 1:
        raise ValueError(f"moment order must be >= 1, got {m}")
    ma, mb = _pair_modes(state.basis, pair)
    if rotated:
        a, b = _mode_polys(ma, mb, rotated=True)
        am, bm = _poly_pow(a, m), _poly_pow(b, m)
        adm, bdm = am.dagger(), bm.dagger()
        c = expectation(state, am * bdm)
        weight_a = adm * am
        weight_b = bdm * bm
        q = _real(expectation(state, weight_a * weight_b))
        denom_b = _real(
            expectation(state, weight_a * (bm * bdm))
            - expectation(state, weight_a * weight_b)
        )
        denom_a = _real(
            expectation(state, (am * adm) * weight_b)
            - expectation(state, weight_a * weight_b)
        )
        n_a = _real(expectation(state, a.dagger() * a))
        n_b = _real(expectation(state, b.dagger() * b))
        return HZMoments(m, complex(c), q, denom_a, denom_b, n_a, n_b)
    c = expectation(state, destroy(ma, m) * create(mb, m))
    q = _real(
        expectation(
            state, create(ma, m) * destroy(ma, m) * create(mb, m) * destroy(mb, m)
        )
    )
    weight_a = create(ma, m) * destroy(ma, m)
    weight_b = create(mb, m) * destroy(mb, m)
    denom_b = _real(
        expectation(state, weight_a * destroy(mb, m) * create(mb, m))
        - expectation(state, weight_a * weight_b)
    )
    denom_a = _real(
        expectation(state, destroy(ma, m) * create(ma, m) * weight_b)
        - expectation(state, weight_a * weight_b)
    )
    n_a = _real(expectation(state, create(ma) * destroy(ma)))
    n_b = _real(expectation(state, create(mb) * destroy(mb)))
    return HZMoments(m, complex(c), q, denom_a, denom_b, n_a, n_b)


def interwell_spin_stats(state: State, pair: int = 0) -> SpinStats:
    """Schwinger spin statistics of a junction pair."""
    ma, mb = _pair_modes(state.basis, pair)
    a, b = _mode_polys(ma, mb, rotated=False)
    return _stats(state, a, b)


def rotated_pair_stats(state: State, pair: int = 0) -> SpinStats:
    """Spin statistics of the rotated pair modes.

    Computed by transforming operators; the state is never rebuilt.
    """
    ma, mb = _pair_modes(state.basis, pair)
    a, b = _mode_polys(ma, mb, rotated=True)
    return _stats(state, a, b)


def _site_spins(
    basis: FockBasis, rotated: bool
) -> tuple[OpPoly, OpPoly, OpPoly, OpPoly, OpPoly, OpPoly]:
    """Raising, lowering and Z operators of the two intra-well site spins.

    Site A holds the first mode of each junction pair, site B the second.
    The Z components are half the species-2 minus species-1 occupation of
    the site, the pairing under which [J-, J+] = 2 J^Z.
    """
    if basis.n_modes != 4:
        raise ValueError("local spin quartics need a four-mode state")
    a1, b1 = _mode_polys(0, 1, rotated)
    a2, b2 = _mode_polys(2, 3, rotated)
    jp_a = a1.dagger() * a2
    jp_b = b1.dagger() * b2
    jz_a = 0.5 * (_num(a2) - _num(a1))
    jz_b = 0.5 * (_num(b2) - _num(b1))
    return jp_a, jp_a.dagger(), jz_a, jp_b, jp_b.dagger(), jz_b


def local_spin_quartics(state: State, rotated: bool = False) -> SpinQuartics:
    """Quartic local-spin moments of a four-mode state.

    With ``rotated=True`` both junction pairs are rotated identically before
    the site spins are formed.
    """
    jp_a, jm_a, jz_a, jp_b, jm_b, jz_b = _site_spins(state.basis, rotated)
    cross = complex(expectation(state, jp_a * jm_b))
    quartic = _real(expectation(state, jp_a * jm_a * jp_b * jm_b))
    d_a = 2.0 * _real(expectation(state, jz_a * jp_b * jm_b))
    d_b = 2.0 * _real(expectation(state, jp_a * jm_a * jz_b))

    def planar_square(jp, jm):
        # (J)^2 - (J^Z)^2 is identically J_X^2 + J_Y^2
        jx = 0.5 * (jp + jm)
        jy = -0.5j * (jp - jm)
        return jx * jx + jy * jy

    planar_a = planar_square(jp_a, jm_a)
    planar_b = planar_square(jp_b, jm_b)
    steer_a = _real(expectation(state, (planar_a + jz_a) * planar_b))
    steer_a_minus = _real(expectation(state, (planar_a - jz_a) * planar_b))
    return SpinQuartics(cross, quartic, d_a, d_b, steer_a, steer_a_minus)


def ellipsoid(
    state: State, pair: int = 0
) -> tuple[float, float, float, np.ndarray]:
    """Variance-ellipsoid data: (Var J_X, Var J_Y, Var J_Z, mean vector)."""
    s = interwell_spin_stats(state, pair)
    return (
        s.var_x,
        s.var_y,
        s.var_z,
        np.array([s.mean_x, s.mean_y, s.mean_z]),
    )


def quadrature_D(state: State, pair: int = 0) -> float:
    """Interferometric quadrature sum D = 4(1 + <a†,a> + <b†,b> - <a,b> -
    <a†,b†>) with centered moments <x,y> = <xy> - <x><y>.

    First moments of single ladder operators vanish identically in a fixed
    sector but are evaluated literally, so the expression stays valid if
    number-nonconserving states are ever introduced.
    """
    ma, mb = _pair_modes(state.basis, pair)

    def raw(op: LadderString) -> complex:
        return _expectation_unchecked(state, op)

    mean_a = raw(destroy(ma))
    mean_b = raw(destroy(mb))
    mean_ad = raw(create(ma))
    mean_bd = raw(create(mb))
    cent_ada = raw(create(ma) * destroy(ma)) - mean_ad * mean_a
    cent_bdb = raw(create(mb) * destroy(mb)) - mean_bd * mean_b
    cent_ab = raw(destroy(ma) * destroy(mb)) - mean_a * mean_b
    cent_adbd = raw(create(ma) * create(mb)) - mean_ad * mean_bd
    value = 4.0 * (1.0 + cent_ada + cent_bdb - cent_ab - cent_adbd)
    return _real(value)


def reduced_entropy(state: PureState) -> float:
    """Base-2 entropy of the single-well occupation distribution of a pure
    two-mode state (its Schmidt spectrum)."""
    if not isinstance(state, PureState):
        raise TypeError("reduced_entropy expects a pure state")
    if state.basis.n_modes != 2:
        raise ValueError("reduced_entropy is defined for two-mode states")
    p = state.probabilities()
    total = p.sum()
    if total <= 0:
        raise ValueError("state has zero norm")
    p = p / total
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())
