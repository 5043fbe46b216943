r"""Special functions and summation/quadrature helpers.

Everything here works in double precision.  The modified Bessel functions are
restricted to the few small integer orders the rest of the package needs:

* :func:`bessel_i` uses the ascending series (all terms positive, so no
  cancellation) up to ``x = 60`` and the Hankel asymptotic expansion above.
* :func:`bessel_k` evaluates the integral representation

  .. math:: K_\nu(x) = \int_0^\infty e^{-x\cosh t}\cosh(\nu t)\,dt

  with the trapezoidal rule.  The integrand is entire and decays doubly
  exponentially, so the rule converges geometrically in the step size; the
  step is halved until two successive estimates agree to machine precision.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError, NoConvergence, NonFinite, TailNotConverged

I_SERIES_CUTOFF = 60.0
_MAX_I_ORDER = 3
_MAX_K_ORDER = 3
_LOG_MAX = 709.0


def log_gamma(x: float) -> float:
    """log Γ(x) for x > 0."""
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"log_gamma needs a finite x > 0, got {x!r}")
    return math.lgamma(x)


def log_factorial(n: int) -> float:
    if n < 0:
        raise DomainError(f"log_factorial needs n >= 0, got {n}")
    return math.lgamma(n + 1.0)


def _check_order(order: int, top: int) -> int:
    if int(order) != order or not 0 <= order <= top:
        raise DomainError(f"order must be an integer in [0, {top}], got {order!r}")
    return int(order)


def bessel_i(order: int, x: float) -> float:
    """Modified Bessel function of the first kind I_order(x), x >= 0.

    Relative accuracy is ~1e-15 on the series branch (x <= 60) and better
    than 1e-12 on the asymptotic branch.
    """
    nu = _check_order(order, _MAX_I_ORDER)
    if not x >= 0 or math.isnan(x):
        raise DomainError(f"bessel_i needs x >= 0, got {x!r}")
    if x == 0.0:
        return 1.0 if nu == 0 else 0.0
    if x <= I_SERIES_CUTOFF:
        return _bessel_i_series(nu, x)
    return _bessel_i_asymptotic(nu, x)


def _bessel_i_series(nu: int, x: float) -> float:
    half = 0.5 * x
    quarter_sq = half * half
    term = half**nu / math.factorial(nu)
    terms = [term]
    running = term
    m = 0
    while True:
        m += 1
        term *= quarter_sq / (m * (m + nu))
        terms.append(term)
        running += term
        if term <= 1e-17 * running:
            break
    return math.fsum(terms)


def _bessel_i_asymptotic(nu: int, x: float) -> float:
    if x > _LOG_MAX:
        raise NonFinite(f"I_{nu}({x}) overflows double precision")
    mu = 4.0 * nu * nu
    term = 1.0
    terms = [term]
    k = 0
    while True:
        k += 1
        nxt = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if nxt == 0.0 or abs(nxt) >= abs(term) or abs(nxt) < 1e-18:
            if nxt != 0.0 and abs(nxt) < abs(term):
                terms.append(nxt)
            break
        terms.append(nxt)
        term = nxt
    return math.exp(x) / math.sqrt(2.0 * math.pi * x) * math.fsum(terms)


def bessel_k(order: int, x: float) -> float:
    """Modified Bessel function of the second kind K_order(x), x > 0."""
    return math.exp(-x) * bessel_k_scaled(order, x)


def bessel_k_scaled(order: int, x: float) -> float:
    """exp(x) * K_order(x); stays finite for large x."""
    nu = _check_order(order, _MAX_K_ORDER)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"bessel_k needs a finite x > 0, got {x!r}")
    # integrand e^{-x(cosh t - 1)} cosh(nu t) is below e^{-745} past t_max
    t_max = math.acosh(1.0 + 760.0 / x) + 2.0
    if nu:
        t_max += nu * t_max / 10.0

    def integrand(t: np.ndarray) -> np.ndarray:
        s = np.sinh(0.5 * t)
        return np.exp(-2.0 * x * s * s) * np.cosh(nu * t)

    h = 0.5
    nodes = np.arange(1, int(t_max / h) + 1) * h
    total = 0.5 * integrand(np.zeros(1))[0] + math.fsum(integrand(nodes))
    estimate = h * total
    for _ in range(12):
        h *= 0.5
        odd = (2 * np.arange(int(t_max / (2 * h)) + 1) + 1) * h
        total += math.fsum(integrand(odd))
        refined = h * total
        if abs(refined - estimate) <= 1e-15 * abs(refined):
            return refined
        estimate = refined
    raise NoConvergence(f"K_{nu}({x}) trapezoid rule did not settle")


# ---------------------------------------------------------------------------
# log-space series summation


@dataclass
class SeriesAccumulator:
    """Running sum of terms given by (log|term|, sign).

    The sum is held as ``exp(log_scale) * (total + comp)`` with Neumaier
    compensation.  The scale only moves when a term outgrows it by more than
    e^300, so ordinary additions incur no rescaling round-off.
    """

    log_scale: float = -math.inf
    total: float = 0.0
    comp: float = 0.0
    n_terms: int = 0
    last_ratio: float = math.nan
    tail_bound: float = math.inf

    def add(self, log_mag: float, sign: float = 1.0) -> None:
        self.n_terms += 1
        if log_mag == -math.inf or sign == 0:
            return
        if math.isnan(log_mag) or log_mag == math.inf:
            raise NonFinite(f"series term has log-magnitude {log_mag}")
        if self.log_scale == -math.inf:
            self.log_scale = log_mag
        elif log_mag > self.log_scale + 300.0:
            factor = math.exp(self.log_scale - log_mag)
            self.total *= factor
            self.comp *= factor
            self.log_scale = log_mag
        x = math.copysign(math.exp(log_mag - self.log_scale), sign)
        t = self.total + x
        if abs(self.total) >= abs(x):
            self.comp += (self.total - t) + x
        else:
            self.comp += (x - t) + self.total
        self.total = t

    @property
    def scaled_sum(self) -> float:
        return self.total + self.comp

    @property
    def sign(self) -> float:
        s = self.scaled_sum
        return 0.0 if s == 0 else math.copysign(1.0, s)

    @property
    def log_value(self) -> float:
        s = self.scaled_sum
        if s == 0:
            return -math.inf
        return self.log_scale + math.log(abs(s))

    @property
    def value(self) -> float:
        lv = self.log_value
        if lv == -math.inf:
            return 0.0
        if lv > _LOG_MAX:
            raise NonFinite(f"series sum exp({lv:.6g}) overflows; use log_value")
        return math.copysign(math.exp(lv), self.sign)


def _split_term(item) -> tuple[float, float]:
    if isinstance(item, tuple):
        log_mag, sign = item
        return float(log_mag), float(sign)
    return float(item), 1.0


def sum_log_series(
    log_terms: Iterable,
    tol: float = 1e-16,
    max_terms: int = 100_000,
    patience: int = 3,
) -> SeriesAccumulator:
    """Sum a series whose terms arrive as log-magnitudes.

    Items are either ``log|t_n|`` (positive terms) or ``(log|t_n|, sign)``.
    Summation stops once ``|t_n| / |partial sum| < tol`` for ``patience``
    consecutive terms.  The reported ``tail_bound`` is relative to the sum and
    assumes the terms keep shrinking at least geometrically with the last
    observed ratio.
    """
    acc = SeriesAccumulator()
    streak = 0
    prev = None
    log_mag = -math.inf
    for item in log_terms:
        log_mag, sign = _split_term(item)
        acc.add(log_mag, sign)
        lv = acc.log_value
        if log_mag == -math.inf:
            ratio = 0.0
        elif lv == -math.inf:
            ratio = math.inf
        else:
            ratio = math.exp(min(log_mag - lv, _LOG_MAX))
        acc.last_ratio = ratio
        streak = streak + 1 if ratio < tol else 0
        if streak >= patience:
            if log_mag == -math.inf:
                acc.tail_bound = 0.0
            else:
                r = math.exp(log_mag - prev) if prev is not None and prev > -math.inf else math.inf
                acc.tail_bound = ratio * r / (1.0 - r) if r < 1.0 else ratio
            return acc
        if acc.n_terms >= max_terms:
            raise TailNotConverged(
                f"series not converged after {acc.n_terms} terms (last ratio {ratio:.3e})"
            )
        prev = log_mag
    acc.tail_bound = 0.0
    return acc


def compensated_cumsum(increments: np.ndarray, start: float = 0.0) -> np.ndarray:
    """Cumulative sum with block-wise error compensation.

    Each block of 256 is summed with numpy and the block offsets are carried
    in double-double form, so the absolute error stays near one ulp of the
    result instead of growing with the length.
    """
    inc = np.asarray(increments, dtype=float)
    out = np.empty_like(inc)
    hi, lo = float(start), 0.0
    block = 256
    for i in range(0, inc.size, block):
        local = np.cumsum(inc[i : i + block])
        out[i : i + block] = hi + (lo + local)
        step = float(local[-1])
        s = hi + step
        bp = s - hi
        lo += (hi - (s - bp)) + (step - bp)
        hi = s
    return out


# ---------------------------------------------------------------------------
# quadrature

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK constants)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
GK15_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK15_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes sit at the odd positions of the Kronrod node list
G7_WEIGHTS = np.zeros(15)
G7_WEIGHTS[[1, 3, 5]] = _WG[:3]
G7_WEIGHTS[7] = _WG[3]
G7_WEIGHTS[[9, 11, 13]] = _WG[2::-1]


@dataclass(frozen=True)
class QuadratureRule:
    """Fixed node/weight rule for ∫₀^∞ f(x) dx."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    descriptor: str = ""
    coarse: "QuadratureRule | None" = None

    def __post_init__(self):
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if np.any(np.diff(self.nodes) <= 0):
            raise ValueError("quadrature nodes must be strictly increasing")


def gauss_laguerre_rule(order: int) -> QuadratureRule:
    """Gauss-Laguerre rule with the e^{-x} weight folded into the weights.

    Exact for integrands of the form e^{-x} · polynomial of degree < 2*order.
    """
    x, w = np.polynomial.laguerre.laggauss(order)
    coarse = gauss_laguerre_rule(order // 2) if order >= 4 else None
    return QuadratureRule(x, w * np.exp(x), order, f"gauss-laguerre-{order}", coarse)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    n_evals: int = 0
    cutoff: float = math.inf


def _eval(f: Callable, xs: np.ndarray) -> np.ndarray:
    return np.array([f(float(x)) for x in xs], dtype=float)


def _gk15(f: Callable, a: float, b: float) -> tuple[float, float]:
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    fx = _eval(f, c + h * GK15_NODES)
    k = h * math.fsum(GK15_WEIGHTS * fx)
    g = h * math.fsum(G7_WEIGHTS * fx)
    return k, float(abs(k - g))


def integrate_interval(
    f: Callable[[float], float],
    breakpoints: Iterable[float],
    abs_tol: float = 0.0,
    rel_tol: float = 1e-12,
    max_intervals: int = 4000,
) -> QuadResult:
    """Globally adaptive Gauss-Kronrod (7/15) integration over [a, b].

    ``breakpoints`` is the initial partition; the interval with the largest
    error estimate is bisected until the summed estimate meets the tolerance.
    """
    pts = list(breakpoints)
    heap = []
    for a, b in zip(pts[:-1], pts[1:]):
        val, err = _gk15(f, a, b)
        heapq.heappush(heap, (-err, a, b, val))
    evals = 15 * len(heap)
    while True:
        total = math.fsum(item[3] for item in heap)
        error = math.fsum(-item[0] for item in heap)
        if error <= max(abs_tol, rel_tol * abs(total)):
            return QuadResult(total, error, evals)
        if len(heap) >= max_intervals:
            raise NoConvergence(
                f"adaptive quadrature stalled at {len(heap)} intervals "
                f"(value {total:.6e}, error {error:.2e})"
            )
        _, a, b, _ = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        for lo, hi in ((a, mid), (mid, b)):
            val, err = _gk15(f, lo, hi)
            heapq.heappush(heap, (-err, lo, hi, val))
        evals += 30


def integrate_semi_infinite(
    f: Callable[[float], float],
    rule: QuadratureRule | None = None,
    *,
    sqrt_substitution: bool = False,
    abs_tol: float = 0.0,
    rel_tol: float = 1e-12,
    cut_ratio: float = 1e-22,
    max_intervals: int = 4000,
) -> QuadResult:
    """∫₀^∞ f(x) dx.

    With ``rule`` the fixed rule is applied and the error is the difference
    to its coarse companion (nan when there is none).  Otherwise the
    integrand is integrated adaptively on [0, X] where X is the first
    doubling point at which the integrand has dropped below ``cut_ratio``
    times its running maximum; the tail beyond X is estimated from the local
    exponential decay rate and added to the error.

    ``sqrt_substitution`` integrates 2u f(u²) du instead, which removes the
    √x behaviour at the origin of integrands like x K₂(2√x).
    """
    if rule is not None:
        value = math.fsum(rule.weights * _eval(f, rule.nodes))
        if rule.coarse is None:
            return QuadResult(value, math.nan, rule.order)
        coarse = math.fsum(rule.coarse.weights * _eval(f, rule.coarse.nodes))
        return QuadResult(value, abs(value - coarse), rule.order + rule.coarse.order)

    if sqrt_substitution:
        def g(u: float) -> float:
            return 2.0 * u * f(u * u)
    else:
        g = f

    # march outward until the integrand is negligible and decaying
    pts = [0.0, 1.0]
    peak = abs(g(1.0))
    prev = peak
    upper = 1.0
    while True:
        nxt = 2.0 * upper
        val = abs(g(nxt))
        if not math.isfinite(val):
            raise NoConvergence(f"integrand is not finite at {nxt}")
        peak = max(peak, val)
        pts.append(nxt)
        if val <= cut_ratio * peak and val <= prev:
            upper, last, before = nxt, val, prev
            break
        prev = val
        upper = nxt
        if upper > 1e8:
            raise NoConvergence("integrand does not decay on [0, 1e8]")
    res = integrate_interval(g, pts, abs_tol=abs_tol, rel_tol=rel_tol,
                             max_intervals=max_intervals)
    if last == 0.0:
        tail = 0.0
    else:
        rate = math.log(before / last) / (0.5 * upper) if before > last else 0.0
        tail = last / rate if rate > 0 else math.inf
    cutoff = upper * upper if sqrt_substitution else upper
    return QuadResult(res.value, res.error + tail, res.n_evals, cutoff)
