"""Generalized Heisenberg algebra on a truncated Fock space.

A representation is fixed by a characteristic function f and a ground-state
energy E_0: the levels are the orbit E_{n+1} = f(E_n), and the ladder
operators act as

    A† |m> = N_m |m+1>,    A |m> = N_{m-1} |m-1>,    N_m² = E_{m+1} - E_0.

The space is cut at n_max.  Raising the top level is an error rather than a
silent drop so truncation artifacts never masquerade as algebra violations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NegativeSquare,
    NonFinite,
    NonMonotonicLadder,
    TruncationOverflow,
)


@dataclass(frozen=True)
class CharacteristicFn:
    eval: Callable[[float], float]
    descriptor: str = "f"

    def __call__(self, x: float) -> float:
        return self.eval(x)


def harmonic_fn() -> CharacteristicFn:
    return CharacteristicFn(lambda x: x + 1.0, "x + 1")


def square_well_fn() -> CharacteristicFn:
    return CharacteristicFn(lambda x: (math.sqrt(x) + 1.0) ** 2, "(sqrt(x) + 1)^2")


def q_deformed_fn(q: float) -> CharacteristicFn:
    return CharacteristicFn(lambda x: q * x + 1.0, f"{q!r} x + 1")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def iterate_spectrum(f: Callable[[float], float], e0: float, n_max: int) -> np.ndarray:
    """Return [E_0, ..., E_{n_max}] with E_{k+1} = f(E_k)."""
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if not math.isfinite(e0):
        raise NonFinite(f"E_0 = {e0!r}")
    levels = [float(e0)]
    for k in range(n_max):
        try:
            nxt = float(f(levels[-1]))
        except OverflowError as exc:
            raise NonFinite(f"f overflowed at step {k}") from exc
        if not math.isfinite(nxt):
            raise NonFinite(f"f(E_{k}) = {nxt!r}")
        if nxt <= levels[-1]:
            raise NonMonotonicLadder(f"f(E_{k}) = {nxt!r} <= E_{k} = {levels[-1]!r}")
        levels.append(nxt)
    return np.array(levels)


def ladder_coefficients(energies) -> np.ndarray:
    """N_m = sqrt(E_{m+1} - E_0) for m = 0 .. len(energies) - 2."""
    e = np.asarray(energies, dtype=float)
    if e.size == 0:
        return np.empty(0)
    sq = e[1:] - e[0]
    if np.any(sq < 0):
        m = int(np.argmax(sq < 0))
        raise NegativeSquare(f"E_{m + 1} - E_0 = {sq[m]!r} < 0")
    return np.sqrt(sq)


@dataclass(frozen=True)
class GhaRep:
    """A realized representation truncated to levels 0..n_max.

    ``source`` optionally records what the representation was built from
    (e.g. a PowerLawSpec) so callers can reject mismatched inputs.
    """

    energies: np.ndarray
    ladder: np.ndarray
    char_fn: CharacteristicFn
    casimir: float
    source: Any = None

    @classmethod
    def build(cls, f: CharacteristicFn, e0: float, n_max: int, source: Any = None) -> "GhaRep":
        energies = iterate_spectrum(f, e0, n_max)
        return cls(
            energies=_readonly(energies),
            ladder=_readonly(ladder_coefficients(energies)),
            char_fn=f,
            casimir=-float(energies[0]),
            source=source,
        )

    @property
    def n_max(self) -> int:
        return len(self.energies) - 1

    @property
    def dim(self) -> int:
        return len(self.energies)

    def basis(self, n: int) -> "FockVector":
        return FockVector.basis(n, self.dim)


@dataclass(frozen=True)
class FockVector:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1:
            raise DimensionMismatch("Fock vector must be one-dimensional")
        if not np.all(np.isfinite(c)):
            raise NonFinite("Fock vector has non-finite amplitudes")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def basis(cls, n: int, dim: int) -> "FockVector":
        if not 0 <= n < dim:
            raise IndexOutOfRange(f"|{n}> is outside a space of dimension {dim}")
        c = np.zeros(dim, dtype=complex)
        c[n] = 1.0
        return cls(c)

    def __len__(self) -> int:
        return len(self.coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __sub__(self, other: "FockVector") -> "FockVector":
        if len(self) != len(other):
            raise DimensionMismatch(f"{len(self)} vs {len(other)}")
        return FockVector(self.coeffs - other.coeffs)

    def __add__(self, other: "FockVector") -> "FockVector":
        if len(self) != len(other):
            raise DimensionMismatch(f"{len(self)} vs {len(other)}")
        return FockVector(self.coeffs + other.coeffs)

    def __rmul__(self, scalar) -> "FockVector":
        return FockVector(scalar * self.coeffs)


def _padded(v: FockVector, rep: GhaRep) -> np.ndarray:
    if len(v) > rep.dim:
        raise DimensionMismatch(
            f"vector of length {len(v)} does not fit a representation with n_max={rep.n_max}"
        )
    out = np.zeros(rep.dim, dtype=complex)
    out[: len(v)] = v.coeffs
    return out


def apply_annihilation(v: FockVector, rep: GhaRep) -> FockVector:
    c = _padded(v, rep)
    out = np.zeros_like(c)
    out[:-1] = rep.ladder * c[1:]
    return FockVector(out)


def apply_creation(v: FockVector, rep: GhaRep) -> FockVector:
    c = _padded(v, rep)
    if c[-1] != 0:
        raise TruncationOverflow(f"A† on level n_max={rep.n_max} leaves the truncated space")
    out = np.zeros_like(c)
    out[1:] = rep.ladder * c[:-1]
    return FockVector(out)


def apply_hamiltonian(v: FockVector, rep: GhaRep) -> FockVector:
    return FockVector(rep.energies * _padded(v, rep))


def apply_char_fn(v: FockVector, rep: GhaRep) -> FockVector:
    """f(H) v, evaluating f on each level rather than reading E_{n+1}."""
    fe = np.array([rep.char_fn(e) for e in rep.energies])
    return FockVector(fe * _padded(v, rep))


def _check_index(n: int, rep: GhaRep) -> None:
    if not 0 <= n <= rep.n_max - 2:
        raise IndexOutOfRange(f"n={n} needs 0 <= n <= n_max - 2 = {rep.n_max - 2}")


def commutator_residual(n: int, rep: GhaRep) -> float:
    """|| [A, A†]|n> - (f(E_n) - E_n)|n> ||, relative to max(1, |f(E_n)|)."""
    _check_index(n, rep)
    v = rep.basis(n)
    lhs = apply_annihilation(apply_creation(v, rep), rep) - apply_creation(
        apply_annihilation(v, rep), rep
    )
    fe = rep.char_fn(rep.energies[n])
    rhs = (fe - rep.energies[n]) * v
    return (lhs - rhs).norm() / max(1.0, abs(fe))


def casimir_values(n: int, rep: GhaRep) -> tuple[float, float]:
    """<n|(A†A - H)|n> and <n|(AA† - f(H))|n>."""
    _check_index(n, rep)
    v = rep.basis(n)
    first = apply_creation(apply_annihilation(v, rep), rep) - apply_hamiltonian(v, rep)
    second = apply_annihilation(apply_creation(v, rep), rep) - apply_char_fn(v, rep)
    return first.coeffs[n].real, second.coeffs[n].real


def casimir_residual(n: int, rep: GhaRep) -> float:
    """Largest disagreement among the two Casimir forms and the stored -E_0.

    Scaled like :func:`commutator_residual`.
    """
    first, second = casimir_values(n, rep)
    scale = max(1.0, abs(rep.char_fn(rep.energies[n])))
    return max(abs(first - second), abs(first - rep.casimir), abs(second - rep.casimir)) / scale
