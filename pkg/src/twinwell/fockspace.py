"""Number-conserving Fock sectors for tunnel-coupled bosonic mode pairs.

A sector fixes the total particle number of each mode pair.  The two-mode
sector with total N holds states |n, N-n> for n = 0..N; the four-mode sector
with totals (N1, N2) is the tensor product of two such sectors, with modes
ordered (a1, b1, a2, b2).  Basis states are enumerated lexicographically by
occupation, so the two-mode rank of |n, N-n> is n and the four-mode rank of
|n1, N1-n1, n2, N2-n2> is n1*(N2+1) + n2.

Operators are ordered products of creation/annihilation factors
(`LadderString`) and complex combinations of such products (`OpPoly`).
Application is vectorized over occupation tuples, so intermediate states may
leave the sector as long as the full product returns to it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

import numpy as np

from .errors import BasisMismatch, SectorViolation

__all__ = [
    "Factor",
    "LadderString",
    "OpPoly",
    "FockBasis",
    "PureState",
    "MixedState",
    "create",
    "destroy",
    "number",
    "enumerate_two_mode",
    "enumerate_four_mode",
    "apply_ladder",
    "expectation",
]

# (mode index, True for creation, power >= 1)
Factor = tuple[int, bool, int]


@dataclass(frozen=True)
class LadderString:
    """Ordered product of ladder-operator factors.

    Factors are listed in operator order: ``factors[0]`` is the leftmost
    factor and therefore acts last.  ``LadderString(()) `` is the identity.
    """

    factors: tuple[Factor, ...]

    def __post_init__(self) -> None:
        for mode, creating, power in self.factors:
            if mode < 0 or not isinstance(mode, int):
                raise ValueError(f"bad mode index {mode!r}")
            if not isinstance(creating, bool):
                raise ValueError("factor flag must be a bool")
            if power < 1:
                raise ValueError(f"factor power must be >= 1, got {power}")

    def __mul__(self, other: "LadderString") -> "LadderString":
        if not isinstance(other, LadderString):
            return NotImplemented
        return LadderString(self.factors + other.factors)

    def dagger(self) -> "LadderString":
        """Hermitian adjoint: reversed order, creation flags flipped."""
        return LadderString(
            tuple((m, not c, p) for m, c, p in reversed(self.factors))
        )

    def net_change(self, n_modes: int) -> tuple[int, ...]:
        """Net quanta added to each mode by the full product."""
        delta = [0] * n_modes
        for mode, creating, power in self.factors:
            if mode >= n_modes:
                raise ValueError(f"mode {mode} out of range for {n_modes} modes")
            delta[mode] += power if creating else -power
        return tuple(delta)


def create(mode: int, power: int = 1) -> LadderString:
    """Creation operator on one mode, raised to ``power``."""
    return LadderString(((mode, True, power),))


def destroy(mode: int, power: int = 1) -> LadderString:
    """Annihilation operator on one mode, raised to ``power``."""
    return LadderString(((mode, False, power),))


def number(mode: int) -> LadderString:
    """Number operator a†a on one mode."""
    return create(mode) * destroy(mode)


class OpPoly:
    """Complex linear combination of ladder strings.

    Supports addition, scalar multiplication, operator products (which
    concatenate factor strings term by term) and the Hermitian adjoint.
    Scalars added to a polynomial become multiples of the identity string.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[tuple[Factor, ...], complex] | None = None):
        self.terms: dict[tuple[Factor, ...], complex] = {}
        if terms:
            for factors, coeff in terms.items():
                if coeff != 0:
                    self.terms[factors] = complex(coeff)

    @classmethod
    def from_string(cls, s: LadderString, coeff: complex = 1.0) -> "OpPoly":
        return cls({s.factors: coeff})

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> "OpPoly":
        return cls({(): coeff})

    @staticmethod
    def _coerce(x: Union["OpPoly", LadderString, complex]) -> "OpPoly":
        if isinstance(x, OpPoly):
            return x
        if isinstance(x, LadderString):
            return OpPoly.from_string(x)
        if isinstance(x, (int, float, complex)):
            return OpPoly.identity(x)
        raise TypeError(f"cannot interpret {type(x).__name__} as an operator")

    def __add__(self, other) -> "OpPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for f, c in other.terms.items():
            out[f] = out.get(f, 0.0) + c
        return OpPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "OpPoly":
        return OpPoly({f: -c for f, c in self.terms.items()})

    def __sub__(self, other) -> "OpPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "OpPoly":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "OpPoly":
        if isinstance(other, (int, float, complex)):
            return OpPoly({f: c * other for f, c in self.terms.items()})
        other = self._coerce(other)
        out: dict[tuple[Factor, ...], complex] = {}
        for f1, c1 in self.terms.items():
            for f2, c2 in other.terms.items():
                key = f1 + f2
                out[key] = out.get(key, 0.0) + c1 * c2
        return OpPoly(out)

    def __rmul__(self, other) -> "OpPoly":
        if isinstance(other, (int, float, complex)):
            return self * other
        return self._coerce(other) * self

    def dagger(self) -> "OpPoly":
        return OpPoly(
            {
                LadderString(f).dagger().factors: np.conj(c)
                for f, c in self.terms.items()
            }
        )

    def __repr__(self) -> str:
        return f"OpPoly({len(self.terms)} terms)"


@dataclass(frozen=True)
class FockBasis:
    """Lexicographic basis of a fixed-number sector.

    ``pair_totals`` lists each conserved mode pair with its total occupation,
    e.g. ``(((0, 1), N),)`` for two modes.
    """

    occupations: tuple[tuple[int, ...], ...]
    pair_totals: tuple[tuple[tuple[int, int], int], ...]
    _occ_array: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        arr = np.asarray(self.occupations, dtype=np.int64)
        arr.setflags(write=False)
        object.__setattr__(self, "_occ_array", arr)

    @property
    def dim(self) -> int:
        return len(self.occupations)

    @property
    def n_modes(self) -> int:
        return len(self.occupations[0])

    @property
    def occ_array(self) -> np.ndarray:
        """Read-only (dim, n_modes) integer array of occupations."""
        return self._occ_array

    def index(self, occ: Iterable[int]) -> int:
        """Rank of one occupation tuple in this basis."""
        occ = tuple(occ)
        r = self.rank_rows(np.asarray([occ], dtype=np.int64))
        if r[1][0]:
            return int(r[0][0])
        raise KeyError(f"{occ} is not in this sector")

    def rank_rows(self, occ: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized rank lookup.

        Returns ``(ranks, valid)`` where ``valid`` marks rows that lie in the
        sector; ranks of invalid rows are unspecified.
        """
        valid = np.all(occ >= 0, axis=1)
        ranks = np.zeros(len(occ), dtype=np.int64)
        stride = 1
        for (ma, mb), total in reversed(self.pair_totals):
            valid &= occ[:, ma] + occ[:, mb] == total
            ranks += occ[:, ma] * stride
            stride *= total + 1
        return ranks, valid

    def describe(self) -> str:
        parts = [
            f"modes ({ma},{mb}) total {t}" for (ma, mb), t in self.pair_totals
        ]
        return " x ".join(parts)


def enumerate_two_mode(total: int) -> FockBasis:
    """Basis |n, total-n> for n = 0..total."""
    if total < 0:
        raise ValueError("total occupation must be >= 0")
    occ = tuple((n, total - n) for n in range(total + 1))
    return FockBasis(occ, (((0, 1), total),))


def enumerate_four_mode(total1: int, total2: int) -> FockBasis:
    """Product basis of two two-mode sectors, modes ordered (a1, b1, a2, b2)."""
    if total1 < 0 or total2 < 0:
        raise ValueError("total occupations must be >= 0")
    occ = tuple(
        (n1, total1 - n1, n2, total2 - n2)
        for n1 in range(total1 + 1)
        for n2 in range(total2 + 1)
    )
    return FockBasis(occ, (((0, 1), total1), ((2, 3), total2)))


@dataclass(frozen=True)
class PureState:
    """State vector over a Fock sector basis.  Amplitudes are not copied."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude vector has shape {amps.shape}, "
                f"basis has dim {self.basis.dim}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "PureState":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.basis, self.amplitudes / n)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class MixedState:
    """Convex mixture of orthonormal pure states over one basis."""

    basis: FockBasis
    weights: np.ndarray
    components: tuple[PureState, ...]

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or len(w) != len(self.components):
            raise ValueError("one weight per component required")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1")
        for c in self.components:
            if c.basis is not self.basis and c.basis != self.basis:
                raise BasisMismatch("component basis differs from mixture basis")
        vecs = np.column_stack([c.amplitudes for c in self.components])
        gram = vecs.conj().T @ vecs
        if not np.allclose(gram, np.eye(len(self.components)), atol=1e-10):
            raise ValueError("components must be orthonormal")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def probabilities(self) -> np.ndarray:
        """Occupation-basis probabilities of the mixture."""
        p = np.zeros(self.basis.dim)
        for wi, c in zip(self.weights, self.components):
            if wi != 0.0:
                p += wi * c.probabilities()
        return p


State = Union[PureState, MixedState]

Operator = Union[LadderString, OpPoly]


def _factor_run(
    occ: np.ndarray, amp: np.ndarray, factors: tuple[Factor, ...]
) -> tuple[np.ndarray, np.ndarray]:
    """Apply a factor string to raw occupation rows, rightmost factor first.

    Rows annihilated by a destruction factor are dropped.  Occupations may
    leave the sector between factors; no basis mapping happens here.
    """
    for mode, creating, power in reversed(factors):
        if len(amp) == 0:
            break
        n = occ[:, mode]
        if creating:
            coeff = np.ones(len(amp))
            for j in range(power):
                coeff *= n + 1 + j
            occ = occ.copy()
            occ[:, mode] = n + power
        else:
            keep = n >= power
            if not np.all(keep):
                occ = occ[keep]
                amp = amp[keep]
                n = occ[:, mode]
            coeff = np.ones(len(amp))
            for j in range(power):
                coeff *= n - j
            occ = occ.copy()
            occ[:, mode] = n - power
        amp = amp * np.sqrt(coeff)
    return occ, amp


def _string_image(
    state_basis: FockBasis, amps: np.ndarray, factors: tuple[Factor, ...]
) -> tuple[np.ndarray, np.ndarray]:
    """Occupation rows and amplitudes of (string @ state), unmapped."""
    nz = amps != 0
    occ = state_basis.occ_array[nz]
    amp = amps[nz]
    return _factor_run(occ, amp, factors)


def _check_conserving(basis: FockBasis, s: LadderString) -> None:
    delta = s.net_change(basis.n_modes)
    for (ma, mb), _total in basis.pair_totals:
        if delta[ma] + delta[mb] != 0:
            raise SectorViolation(
                f"string with net change {delta} does not conserve "
                f"the total of modes ({ma},{mb})"
            )


def apply_ladder(state: PureState, op: LadderString) -> PureState:
    """Apply a number-conserving ladder string to a pure state.

    The result is not normalized.  Raises SectorViolation if the string's
    net quanta change on any conserved pair is nonzero.
    """
    if not isinstance(op, LadderString):
        raise TypeError("apply_ladder expects a LadderString")
    _check_conserving(state.basis, op)
    occ, amp = _string_image(state.basis, state.amplitudes, op.factors)
    ranks, valid = state.basis.rank_rows(occ)
    # a conserving string maps sector states into the sector
    assert np.all(valid)
    out = np.zeros(state.basis.dim, dtype=np.complex128)
    np.add.at(out, ranks, amp)
    return PureState(state.basis, out)


def _pure_expectation_term(
    state: PureState, factors: tuple[Factor, ...], checked: bool
) -> complex:
    occ, amp = _string_image(state.basis, state.amplitudes, factors)
    ranks, valid = state.basis.rank_rows(occ)
    if checked:
        assert np.all(valid)
    elif not np.all(valid):
        # out-of-sector image rows are orthogonal to every basis state
        occ, amp, ranks = occ[valid], amp[valid], ranks[valid]
    if len(amp) == 0:
        return 0.0 + 0.0j
    return complex(np.sum(np.conj(state.amplitudes[ranks]) * amp))


def _is_diagonal(factors: tuple[Factor, ...], n_modes: int) -> bool:
    return LadderString(factors).net_change(n_modes) == (0,) * n_modes


def _diagonal_term(
    basis: FockBasis, probs: np.ndarray, factors: tuple[Factor, ...]
) -> float:
    """<O> of a mode-diagonal string from occupation probabilities alone."""
    nz = probs != 0
    _occ, amp = _factor_run(basis.occ_array[nz], probs[nz], factors)
    return float(np.sum(amp))


def _expect(state: State, op: Operator, checked: bool) -> complex:
    terms = (
        {op.factors: 1.0 + 0.0j} if isinstance(op, LadderString) else op.terms
    )
    if checked:
        for f in terms:
            _check_conserving(state.basis, LadderString(f))
    if isinstance(state, PureState):
        return sum(
            (
                c * _pure_expectation_term(state, f, checked)
                for f, c in terms.items()
            ),
            start=0.0 + 0.0j,
        )
    # mixtures: mode-diagonal terms need only the occupation probabilities;
    # only genuinely off-diagonal terms loop over components
    n_modes = state.basis.n_modes
    diagonal = {f: c for f, c in terms.items() if _is_diagonal(f, n_modes)}
    off_diagonal = {f: c for f, c in terms.items() if f not in diagonal}
    total = 0.0 + 0.0j
    if diagonal:
        probs = state.probabilities()
        total += sum(
            c * _diagonal_term(state.basis, probs, f)
            for f, c in diagonal.items()
        )
    if off_diagonal:
        for w, comp in zip(state.weights, state.components):
            if w == 0.0:
                continue
            total += w * sum(
                (
                    c * _pure_expectation_term(comp, f, checked)
                    for f, c in off_diagonal.items()
                ),
                start=0.0 + 0.0j,
            )
    return total


def expectation(state: State, op: Operator) -> complex:
    """Expectation value <O> of a ladder string or polynomial.

    Every term must conserve the sector totals; SectorViolation is raised
    otherwise.  Mixed states are evaluated as weight-averaged pure
    expectations.
    """
    return _expect(state, op, checked=True)


def _expectation_unchecked(state: State, op: Operator) -> complex:
    """Literal <O> allowing sector-violating terms (their value is exact:
    image components outside the sector contribute zero)."""
    return _expect(state, op, checked=False)
