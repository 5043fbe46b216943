"""Annihilation-operator coherent states for power-law spectra.

    |z,k> = N(|z|^2, k) sum_n z^n / sqrt(g(n,k)) |n>

Every series (normalization, moments, coefficients) is built from one array of
log-terms ``log(|z|^{2n} / g(n,k))`` truncated once, so the norm and the
moments always see the same n_max.

Truncation policy: n_max is the first index past the mode of the distribution
where three consecutive terms of both the norm series and the second-moment
series fall below ``tol**2`` relative to their sums.  Hence the last kept
amplitude |c_{n_max}| is below ``tol``, and the residual of A|z> = z|z> on the
truncated state (which equals |z| |c_{n_max}|) is below ``tol |z|``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .algebra import FockVector, GhaRep, apply_annihilation
from .errors import DimensionMismatch, SpecMismatch, TailNotConverged, VacuumUndefined
from .powerlaw import PowerLawSpec, ladder_squares
from .special import compensated_cumsum

DEFAULT_TOL = 1e-14
DEFAULT_MAX_TERMS = 5_000_000
THREADS_ENV = "GHA_COHERENT_THREADS"


def _logsumexp(a: np.ndarray) -> float:
    m = float(np.max(a))
    if m == -math.inf:
        return -math.inf
    return m + math.log(math.fsum(np.exp(a - m)))


@dataclass(frozen=True)
class _Series:
    log_terms: np.ndarray  # log(|z|^{2n} / g(n,k)), n = 0..n_max
    log_sum: float
    tail_bound: float

    @property
    def n_max(self) -> int:
        return len(self.log_terms) - 1

    def probabilities(self) -> np.ndarray:
        p = np.exp(self.log_terms - float(np.max(self.log_terms)))
        return p / math.fsum(p)


def _mode_estimate(z_sq: float, spec: PowerLawSpec) -> int:
    q = spec.gamma / 4.0
    p = spec.exponent
    return max(0, int((z_sq + q**p) ** (1.0 / p) - q))


def _series(z_sq: float, spec: PowerLawSpec, tol: float, max_terms: int) -> _Series:
    if not z_sq >= 0 or not math.isfinite(z_sq):
        raise ValueError(f"|z|^2 must be finite and >= 0, got {z_sq!r}")
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    if spec.use_physical_omega:
        raise ValueError("coherent states are built in dimensionless units")
    if z_sq == 0.0:
        return _Series(np.zeros(1), 0.0, 0.0)

    log_x = math.log(z_sq)
    log_cut = 2.0 * math.log(tol)
    size = min(max_terms, 2 * _mode_estimate(z_sq, spec) + 64)
    while True:
        n = np.arange(1, size + 1)
        ratio_log = log_x - np.log(ladder_squares(n, spec))  # log t_n / t_{n-1}
        lt = np.concatenate([[0.0], compensated_cumsum(ratio_log)])
        idx = np.arange(size + 1, dtype=float)
        with np.errstate(divide="ignore"):
            l2 = 2.0 * np.log(idx) + lt
        small = (lt - _logsumexp(lt) < log_cut) & (l2 - _logsumexp(l2) < log_cut)
        # past the mode the term ratios stay below one
        falling = np.concatenate([ratio_log < 0, [ratio_log[-1] < 0]])
        ok = small & falling
        run = ok[:-2] & ok[1:-1] & ok[2:]
        hits = np.flatnonzero(run)
        if hits.size:
            n_max = int(hits[0]) + 2
            break
        if size >= max_terms:
            raise TailNotConverged(
                f"coherent-state series for |z|^2={z_sq!r}, k={spec.k_label} "
                f"needs more than {max_terms} terms"
            )
        size = min(max_terms, 2 * size)

    lt = lt[: n_max + 1].copy()
    log_sum = _logsumexp(lt)
    r = math.exp(log_x - math.log(float(ladder_squares(n_max + 1, spec))))
    tail = math.exp(lt[n_max] - log_sum) * r / (1.0 - r)
    lt.setflags(write=False)
    return _Series(lt, log_sum, tail)


@dataclass(frozen=True)
class CoherentState:
    """Normalized, truncated coherent state.

    ``log_coeffs[n]`` is log|c_n|; the phase of c_n is n arg(z).
    ``tail_bound`` bounds the omitted part of sum |c_n|^2.
    """

    z: complex
    spec: PowerLawSpec
    log_coeffs: np.ndarray
    norm_const: float
    truncation: int
    tail_bound: float

    @property
    def coeffs(self) -> np.ndarray:
        n = np.arange(len(self.log_coeffs))
        phase = np.exp(1j * n * np.angle(self.z)) if self.z != 0 else 1.0
        return np.exp(self.log_coeffs) * phase

    @property
    def probabilities(self) -> np.ndarray:
        return np.exp(2.0 * self.log_coeffs)

    def fock_vector(self, dim: int | None = None) -> FockVector:
        c = self.coeffs
        if dim is not None:
            if dim < len(c):
                raise DimensionMismatch(f"state needs {len(c)} levels, got {dim}")
            c = np.concatenate([c, np.zeros(dim - len(c), dtype=complex)])
        return FockVector(c)


def build_state(
    z: complex,
    spec: PowerLawSpec,
    tol: float = DEFAULT_TOL,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> CoherentState:
    z = complex(z)
    s = _series(abs(z) ** 2, spec, tol, max_terms)
    # normalize relative to the peak so the large log_sum never enters
    shifted = s.log_terms - float(np.max(s.log_terms))
    log_coeffs = 0.5 * (shifted - math.log(math.fsum(np.exp(shifted))))
    log_coeffs.setflags(write=False)
    return CoherentState(
        z=z,
        spec=spec,
        log_coeffs=log_coeffs,
        norm_const=math.exp(-0.5 * s.log_sum),
        truncation=s.n_max,
        tail_bound=s.tail_bound,
    )


def normalization(z_sq: float, spec: PowerLawSpec, tol: float = DEFAULT_TOL,
                  max_terms: int = DEFAULT_MAX_TERMS) -> float:
    """N(|z|^2, k) = (sum_n |z|^{2n} / g(n,k))^{-1/2}."""
    return math.exp(-0.5 * _series(z_sq, spec, tol, max_terms).log_sum)


def _pad(c: np.ndarray, size: int) -> np.ndarray:
    return np.concatenate([c, np.zeros(size - len(c), dtype=complex)])


def _same_spec(s1: CoherentState, s2: CoherentState) -> None:
    if s1.spec != s2.spec:
        raise SpecMismatch(f"{s1.spec} vs {s2.spec}")


def overlap(s1: CoherentState, s2: CoherentState) -> complex:
    """<z1|z2>."""
    _same_spec(s1, s2)
    size = max(len(s1.log_coeffs), len(s2.log_coeffs))
    return complex(np.vdot(_pad(s1.coeffs, size), _pad(s2.coeffs, size)))


def state_distance_sq(s1: CoherentState, s2: CoherentState) -> float:
    """|| |z1> - |z2> ||^2 from the coefficient difference.

    Avoids the cancellation in 2 - 2 Re<z1|z2> when the labels are close.
    """
    _same_spec(s1, s2)
    size = max(len(s1.log_coeffs), len(s2.log_coeffs))
    d = _pad(s1.coeffs, size) - _pad(s2.coeffs, size)
    return math.fsum(np.abs(d) ** 2)


def eigen_residual(s: CoherentState, rep: GhaRep) -> float:
    """|| A|z> - z|z> || / |z| on the truncated state (0 for z = 0)."""
    if rep.source is not None and rep.source != s.spec:
        raise SpecMismatch(f"representation built for {rep.source}, state for {s.spec}")
    if rep.n_max < s.truncation + 1:
        raise DimensionMismatch(
            f"representation n_max={rep.n_max} must exceed state truncation {s.truncation}"
        )
    if s.z == 0:
        return 0.0
    v = s.fock_vector(rep.dim)
    return (apply_annihilation(v, rep) - s.z * v).norm() / abs(s.z)


@dataclass(frozen=True)
class PhotonStats:
    z_sq: float
    mean: float
    second_moment: float
    variance: float
    q: float
    n_max_used: int
    tail_bound: float


def photon_statistics(z_sq: float, spec: PowerLawSpec, tol: float = DEFAULT_TOL,
                      max_terms: int = DEFAULT_MAX_TERMS) -> PhotonStats:
    """Mean, second moment, variance and Mandel Q from one truncated series.

    Q is formed as <N(N-1)>/<N> - <N>, which stays accurate both for small
    |z| (where variance and mean nearly cancel) and for large |z|.
    """
    s = _series(z_sq, spec, tol, max_terms)
    if z_sq == 0.0:
        return PhotonStats(0.0, 0.0, 0.0, 0.0, math.nan, 0, 0.0)
    p = s.probabilities()
    n = np.arange(len(p), dtype=float)
    mean = math.fsum(n * p)
    factorial2 = math.fsum(n * (n - 1.0) * p)
    second = math.fsum(n * n * p)
    variance = math.fsum((n - mean) ** 2 * p)
    q = factorial2 / mean - mean
    return PhotonStats(z_sq, mean, second, variance, q, s.n_max, s.tail_bound)


def photon_moment(order: int, z_sq: float, spec: PowerLawSpec, tol: float = DEFAULT_TOL) -> float:
    """<N> for order 1, <N^2> for order 2."""
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    st = photon_statistics(z_sq, spec, tol)
    return st.mean if order == 1 else st.second_moment


def mandel_q(z_sq: float, spec: PowerLawSpec, tol: float = DEFAULT_TOL) -> float:
    if z_sq == 0:
        raise VacuumUndefined("Mandel Q is undefined for the vacuum (<N> = 0)")
    return photon_statistics(z_sq, spec, tol).q


def classify_q(q: float, atol: float = 1e-10) -> str:
    if abs(q) <= atol:
        return "Poissonian"
    return "sub-Poissonian" if q < 0 else "super-Poissonian"


CSV_COLUMNS = ("abs_z", "Q", "mean_n", "variance", "n_max_used", "tail_bound")


@dataclass(frozen=True)
class QSample:
    abs_z: float
    Q: float
    mean_n: float
    variance: float
    n_max_used: int
    tail_bound: float


@dataclass(frozen=True)
class QCurve:
    spec: PowerLawSpec
    samples: tuple[QSample, ...]

    @property
    def abs_z(self) -> np.ndarray:
        return np.array([s.abs_z for s in self.samples])

    @property
    def q(self) -> np.ndarray:
        return np.array([s.Q for s in self.samples])

    def sign_changes(self) -> int:
        signs = np.sign(self.q)
        signs = signs[signs != 0]
        return int(np.count_nonzero(np.diff(signs)))

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for s in self.samples:
            w.writerow([repr(s.abs_z), repr(s.Q), repr(s.mean_n), repr(s.variance),
                        s.n_max_used, repr(s.tail_bound)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "k": self.spec.k_label,
            "gamma": self.spec.gamma,
            "columns": list(CSV_COLUMNS),
            "samples": [asdict(s) for s in self.samples],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def q_curve(spec: PowerLawSpec, z_grid, tol: float = DEFAULT_TOL,
            workers: int | None = None) -> QCurve:
    """Sample Mandel Q over a sorted grid of |z| > 0.

    Points may be evaluated concurrently; samples are always returned in grid
    order.
    """
    grid = [float(z) for z in z_grid]
    if not grid:
        raise ValueError("empty |z| grid")
    if any(z <= 0 for z in grid):
        raise ValueError("|z| grid values must be > 0")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("|z| grid must be sorted")

    def sample(abs_z: float) -> QSample:
        try:
            st = photon_statistics(abs_z * abs_z, spec, tol)
        except TailNotConverged as exc:
            raise TailNotConverged(f"|z|={abs_z!r}: {exc}") from exc
        return QSample(abs_z, st.q, st.mean, st.variance, st.n_max_used, st.tail_bound)

    n_workers = workers or worker_count()
    if n_workers == 1:
        samples = [sample(z) for z in grid]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            samples = list(pool.map(sample, grid))
    return QCurve(spec, tuple(samples))
