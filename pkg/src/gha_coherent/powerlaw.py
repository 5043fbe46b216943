"""WKB spectrum of V(x) = V0 |x/a|^k and the algebra data derived from it.

Energies are dimensionless by default, E_n = (n + gamma/4)^p with
p = 2k/(k+2).  k = inf selects the infinite square well through exact closed
forms (p = 2) rather than a large float.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .algebra import CharacteristicFn, GhaRep
from .errors import Inconclusive, MissingPhysicalParams, PhysicalModeUnsupported
from .special import compensated_cumsum, log_gamma


@dataclass(frozen=True)
class PowerLawSpec:
    k: float = 2.0
    gamma: float = 4.0
    v0: float | None = None
    a: float | None = None
    mass: float | None = None
    use_physical_omega: bool = False

    def __post_init__(self):
        if math.isnan(self.k) or not self.k > 0:
            raise ValueError(f"k must be > 0, got {self.k!r}")
        if not math.isfinite(self.gamma) or self.gamma < 0:
            raise ValueError(f"gamma must be finite and >= 0, got {self.gamma!r}")
        for name in ("v0", "a", "mass"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")
        if self.use_physical_omega and None in (self.v0, self.a, self.mass):
            raise MissingPhysicalParams("physical mode needs v0, a and mass")

    @property
    def is_square_well(self) -> bool:
        return math.isinf(self.k)

    @property
    def exponent(self) -> float:
        """p = 2k/(k+2); exactly 2 for the square well."""
        if self.is_square_well:
            return 2.0
        return 2.0 * self.k / (self.k + 2.0)

    @property
    def k_label(self) -> str:
        return "inf" if self.is_square_well else f"{self.k:g}"


def effective_frequency(spec: PowerLawSpec) -> float:
    """omega(k) from V0, a and the mass; k = inf gives pi^2 / (8 m a^2)."""
    if None in (spec.v0, spec.a, spec.mass):
        raise MissingPhysicalParams("effective_frequency needs v0, a and mass")
    inv_k = 0.0 if spec.is_square_well else 1.0 / spec.k
    log_ratio = log_gamma(inv_k + 1.5) - log_gamma(inv_k + 1.0) - log_gamma(1.5)
    log_base = (
        math.log(math.pi / (2.0 * spec.a * math.sqrt(2.0 * spec.mass)))
        + inv_k * math.log(spec.v0)
        + log_ratio
    )
    return math.exp(spec.exponent * log_base)


def energy(n, spec: PowerLawSpec):
    """E_n for scalar or array n >= 0."""
    n_arr = np.asarray(n, dtype=float)
    if np.any(n_arr < 0):
        raise ValueError("level index must be >= 0")
    e = (n_arr + spec.gamma / 4.0) ** spec.exponent
    if spec.use_physical_omega:
        e = e * effective_frequency(spec)
    return float(e) if e.ndim == 0 else e


def characteristic_fn(x: float, spec: PowerLawSpec) -> float:
    """f(x) = (x^{1/p} + 1)^p, so that f(E_n) = E_{n+1}."""
    if spec.use_physical_omega:
        raise PhysicalModeUnsupported("the closed-form f assumes omega(k) = 1")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x!r}")
    if spec.is_square_well:
        return (math.sqrt(x) + 1.0) ** 2
    p = spec.exponent
    return (x ** (1.0 / p) + 1.0) ** p


def char_fn_for(spec: PowerLawSpec) -> CharacteristicFn:
    if spec.is_square_well:
        desc = "(sqrt(x) + 1)^2"
    else:
        desc = f"(x^(1/p) + 1)^p, p = {spec.exponent!r}"
    return CharacteristicFn(lambda x: characteristic_fn(x, spec), desc)


def rep_for_spec(spec: PowerLawSpec, n_max: int) -> GhaRep:
    """GHA representation with E_0 from the WKB formula and levels from f."""
    if spec.use_physical_omega:
        raise PhysicalModeUnsupported("algebra representations are dimensionless")
    return GhaRep.build(char_fn_for(spec), energy(0, spec), n_max, source=spec)


def ladder_squares(n, spec: PowerLawSpec) -> np.ndarray:
    """N_{n-1}^2 = E_n - E_0 for n >= 1 (dimensionless), vectorized."""
    n_arr = np.asarray(n, dtype=float)
    q = spec.gamma / 4.0
    if spec.is_square_well:
        return n_arr * (n_arr + 2.0 * q)
    p = spec.exponent
    if p == 1.0:
        return n_arr
    return (n_arr + q) ** p - q**p


def log_g_sequence(n_max: int, spec: PowerLawSpec) -> np.ndarray:
    """[log g(0,k), ..., log g(n_max,k)] with g(n,k) = prod_{i<=n} (E_i - E_0)."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    inc = np.log(ladder_squares(np.arange(1, n_max + 1), spec))
    return np.concatenate([[0.0], compensated_cumsum(inc)])


def g_factor(n: int, spec: PowerLawSpec) -> float:
    """log g(n, k).  g itself is always positive, so only the log is returned."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 0.0
    inc = np.log(ladder_squares(np.arange(1, n + 1), spec))
    return math.fsum(inc)


class SpacingClass(str, enum.Enum):
    TIGHTENING = "tightening"
    UNIFORM = "uniform"
    LOOSENING = "loosening"


def spacing_class(spec: PowerLawSpec, n_max: int) -> SpacingClass:
    """Classify how Delta E_n = E_n - E_{n-1} moves over n = 1..n_max."""
    if n_max < 3:
        raise ValueError("spacing_class needs n_max >= 3")
    e = np.atleast_1d(energy(np.arange(n_max + 1), spec))
    gaps = np.diff(e)
    change = np.diff(gaps)
    scale = max(1.0, float(np.max(np.abs(gaps))))
    if np.all(np.abs(change) <= 1e-12 * scale):
        return SpacingClass.UNIFORM
    if np.all(change > 0):
        return SpacingClass.TIGHTENING
    if np.all(change < 0):
        return SpacingClass.LOOSENING
    raise Inconclusive(f"level spacings change sign for k={spec.k_label}")
