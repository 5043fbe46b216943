"""Command-line front end.

    gha-coherent spectrum --k 2 --gamma 0 --n-max 5
    gha-coherent qsweep --k 0.5 --k 1 --k 1.5 --gamma 4 --z 0.1:10:100 --out loose.csv
    gha-coherent verify [--weight square-well-paper] [--tol 1e-8] [--out report.json]
    gha-coherent coeffs --k inf --gamma 4 --z 2

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coherent import (
    build_state,
    eigen_residual,
    normalization,
    q_curve,
)
from .algebra import casimir_residual, commutator_residual
from .errors import GhaError, NoConvergence, TailNotConverged
from .powerlaw import (
    PowerLawSpec,
    characteristic_fn,
    effective_frequency,
    energy,
    rep_for_spec,
    spacing_class,
)
from .resolution import SCHEMA_VERSION, WEIGHT_LABELS, verify_resolution, weight_by_label
from .special import bessel_i

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_GRID = "0.1:10:100"
MAX_SWEEP_TOL = 1e-4


class ConfigError(GhaError, ValueError):
    pass


def parse_k(token) -> float:
    if isinstance(token, (int, float)):
        return float(token)
    text = str(token).strip().lower()
    if text in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"invalid k value {token!r}") from None


def parse_grid(text: str, log_grid: bool = False) -> np.ndarray:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must look like min:max:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"grid must look like min:max:count, got {text!r}") from None
    if not lo > 0:
        raise ConfigError("grid minimum must be > 0")
    if count < 2:
        raise ConfigError("grid count must be >= 2")
    if hi <= lo:
        raise ConfigError("grid maximum must exceed the minimum")
    if log_grid:
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


@dataclass
class RunConfig:
    ks: list[float] = field(default_factory=lambda: [2.0])
    gamma: float = 4.0
    v0: float | None = None
    a: float | None = None
    mass: float | None = None
    physical: bool = False
    z_grid: str = DEFAULT_GRID
    log_grid: bool = False
    z: complex | None = None
    tol: float | None = None
    n_max: int = 10
    out: str | None = None
    fmt: str | None = None
    weights: list[str] = field(default_factory=lambda: list(WEIGHT_LABELS))
    emit_plot_script: bool = False

    def specs(self) -> list[PowerLawSpec]:
        try:
            return [
                PowerLawSpec(k, self.gamma, self.v0, self.a, self.mass, self.physical)
                for k in self.ks
            ]
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def sweep_tol(self) -> float:
        tol = 1e-14 if self.tol is None else self.tol
        if not 0 < tol <= MAX_SWEEP_TOL:
            raise ConfigError(f"tol must lie in (0, {MAX_SWEEP_TOL}], got {tol!r}")
        return tol


_CONFIG_KEYS = {
    "k", "gamma", "v0", "a", "mass", "physical", "z_grid", "log_grid", "z", "tol",
    "n_max", "out", "format", "weight", "emit_plot_script",
}


def load_config_file(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge the optional config file with command-line flags (flags win)."""
    file_cfg = load_config_file(args.config) if args.config else {}
    cfg = RunConfig()

    def pick(flag, key):
        value = getattr(args, flag, None)
        return value if value is not None else file_cfg.get(key)

    ks = pick("k", "k")
    if ks is not None:
        cfg.ks = [parse_k(k) for k in (ks if isinstance(ks, list) else [ks])]
    weights = pick("weight", "weight")
    if weights is not None:
        cfg.weights = weights if isinstance(weights, list) else [weights]
        bad = [w for w in cfg.weights if w not in WEIGHT_LABELS]
        if bad:
            raise ConfigError(f"unknown weight(s): {', '.join(bad)}")
    for flag, key, conv in (
        ("gamma", "gamma", float), ("v0", "v0", float), ("a", "a", float),
        ("mass", "mass", float), ("z_grid", "z_grid", str), ("tol", "tol", float),
        ("n_max", "n_max", int), ("out", "out", str), ("format", "format", str),
    ):
        value = pick(flag, key)
        if value is not None:
            try:
                setattr(cfg, "fmt" if key == "format" else key, conv(value))
            except (TypeError, ValueError):
                raise ConfigError(f"invalid value for {key}: {value!r}") from None
    z = pick("z", "z")
    if z is not None:
        try:
            cfg.z = complex(str(z).replace(" ", "").replace("i", "j"))
        except ValueError:
            raise ConfigError(f"invalid z {z!r}") from None
    for flag in ("physical", "log_grid", "emit_plot_script"):
        if getattr(args, flag, False) or file_cfg.get(flag, False):
            setattr(cfg, flag, True)
    return cfg


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# commands


def cmd_spectrum(cfg: RunConfig) -> int:
    if cfg.n_max < 0:
        raise ConfigError("n-max must be >= 0")
    fmt = cfg.fmt or "table"
    series = []
    for spec in cfg.specs():
        e = np.atleast_1d(energy(np.arange(cfg.n_max + 1), spec))
        cls = spacing_class(spec, cfg.n_max).value if cfg.n_max >= 3 else "n/a"
        omega = effective_frequency(spec) if spec.use_physical_omega else 1.0
        series.append((spec, e, cls, omega))

    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": "spectrum",
            "series": [
                {"k": s.k_label, "gamma": s.gamma, "omega": om, "spacing_class": cls,
                 "energies": [float(v) for v in e]}
                for s, e, cls, om in series
            ],
        }
        _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", cfg.out)
        return EXIT_OK

    lines = []
    for spec, e, cls, omega in series:
        if fmt == "table":
            lines.append(f"# k={spec.k_label} gamma={spec.gamma:g} omega={omega!r}")
            lines.append(f"{'n':>5}  {'E_n':>22}  {'dE_n':>22}")
            for n, en in enumerate(e):
                de = f"{e[n] - e[n - 1]:22.15g}" if n else f"{'':>22}"
                lines.append(f"{n:>5}  {en:22.15g}  {de}")
            lines.append(f"spacing_class: {cls}")
        else:
            lines.append("k,gamma,n,E_n,dE_n,spacing_class")
            for n, en in enumerate(e):
                de = repr(float(e[n] - e[n - 1])) if n else ""
                lines.append(f"{spec.k_label},{spec.gamma!r},{n},{float(en)!r},{de},{cls}")
    _write("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def _series_path(out: str, spec: PowerLawSpec, multiple: bool) -> Path:
    p = Path(out)
    if not multiple:
        return p
    return p.with_name(f"{p.stem}_k{spec.k_label}{p.suffix or '.csv'}")


def _plot_script(paths: list[tuple[PowerLawSpec, Path]]) -> str:
    plots = ", \\\n     ".join(
        f"'{p.name}' using 1:2 with lines title 'k={s.k_label}'" for s, p in paths
    )
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel '|z|'\n"
        "set ylabel 'Q'\n"
        "set xzeroaxis\n"
        f"plot {plots}\n"
    )


def cmd_qsweep(cfg: RunConfig) -> int:
    specs = cfg.specs()
    grid = parse_grid(cfg.z_grid, cfg.log_grid)
    tol = cfg.sweep_tol()
    fmt = cfg.fmt or "csv"
    if fmt not in ("csv", "json"):
        raise ConfigError(f"qsweep format must be csv or json, got {fmt!r}")
    if cfg.emit_plot_script and (cfg.out is None or fmt != "csv"):
        raise ConfigError("--emit-plot-script needs --out and CSV output")

    curves = [q_curve(spec, grid, tol) for spec in specs]

    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": "qsweep",
            "tol": tol,
            "series": [c.to_dict() for c in curves],
        }
        _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", cfg.out)
        return EXIT_OK

    multiple = len(curves) > 1
    if cfg.out is None:
        blocks = []
        for c in curves:
            head = f"# k={c.spec.k_label} gamma={c.spec.gamma:g}\n" if multiple else ""
            blocks.append(head + c.to_csv())
        # two blank lines separate gnuplot data blocks
        sys.stdout.write("\n\n".join(blocks))
        return EXIT_OK

    written = []
    for c in curves:
        path = _series_path(cfg.out, c.spec, multiple)
        path.write_text(c.to_csv())
        written.append((c.spec, path))
    if cfg.emit_plot_script:
        script = Path(cfg.out).with_suffix(".gp")
        script.write_text(_plot_script(written))
        written.append((None, script))
    for _, path in written:
        print(path)
    return EXIT_OK


@dataclass
class Check:
    name: str
    metric: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(self.metric <= self.tolerance)

    def to_dict(self) -> dict:
        return {"name": self.name, "metric": float(self.metric), "tolerance": self.tolerance,
                "passed": self.passed, "detail": self.detail}


ALGEBRA_KS = (0.5, 1.0, 1.5, 2.0, 5.0, 15.0, math.inf)
ALGEBRA_GAMMAS = (0.0, 2.0, 4.0)
ABS_Z = (0.5, 1.0, 2.0, 4.0, 6.0)
WEIGHT_SETUP = {
    "harmonic": (PowerLawSpec(2.0, 4.0), 10, 1e-8),
    "square-well-paper": (PowerLawSpec(math.inf, 4.0), 8, 1e-6),
    "square-well-corrected": (PowerLawSpec(math.inf, 4.0), 8, 1e-6),
}


def run_checks(weights, tol_override: float | None = None):
    """The verification suite; returns (checks, moment reports)."""

    def tol(default):
        return default if tol_override is None else tol_override

    checks = []
    comm = cas = spec_err = 0.0
    for k in ALGEBRA_KS:
        for gamma in ALGEBRA_GAMMAS:
            spec = PowerLawSpec(k, gamma)
            rep = rep_for_spec(spec, 32)
            for n in range(31):
                comm = max(comm, commutator_residual(n, rep))
                cas = max(cas, casimir_residual(n, rep))
            for n in range(51):
                e_next = energy(n + 1, spec)
                spec_err = max(spec_err, abs(characteristic_fn(energy(n, spec), spec) - e_next) / e_next)
    checks.append(Check("algebra.commutator", comm, tol(1e-12), "[A,A†] = f(H) - H, n <= 30"))
    checks.append(Check("algebra.casimir", cas, tol(1e-12), "A†A - H = AA† - f(H) = -E0, n <= 30"))
    checks.append(Check("spectrum.char_fn", spec_err, tol(1e-12), "f(E_n) = E_{n+1}, n <= 50"))

    harm = PowerLawSpec(2.0, 4.0)
    sq = PowerLawSpec(math.inf, 4.0)
    gauss = max(abs(normalization(z * z, harm) / math.exp(-z * z / 2) - 1) for z in ABS_Z)
    checks.append(Check("normalization.harmonic", gauss, tol(1e-12), "N = exp(-|z|^2/2)"))
    bessel = max(
        abs(normalization(z * z, sq) / math.sqrt(z * z / (2 * bessel_i(2, 2 * z))) - 1)
        for z in ABS_Z
    )
    checks.append(Check("normalization.square_well", bessel, tol(1e-10),
                        "N = (|z|^2 / (2 I2(2|z|)))^(1/2)"))

    eig = 0.0
    for k in (0.5, 2.0, 5.0, math.inf):
        spec = PowerLawSpec(k, 4.0)
        for z in (0.5, 2.0, 5.0):
            s = build_state(z, spec, 1e-14)
            eig = max(eig, eigen_residual(s, rep_for_spec(spec, s.truncation + 1)))
    checks.append(Check("coherent.eigen_residual", eig, tol(1e-10), "A|z> = z|z>"))

    reports = []
    for label in weights:
        spec, n_max, default_tol = WEIGHT_SETUP[label]
        report = verify_resolution(spec, weight_by_label(label), n_max, tol(default_tol))
        reports.append(report)
        detail = f"scalar_ratio={report.common_scalar:.12g}"
        if report.flagged:
            detail += " (flagged: not 1)"
        checks.append(Check(f"resolution.{label}", report.max_deviation, report.tol, detail))
    return checks, reports


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.tol is not None and not cfg.tol > 0:
        raise ConfigError("tol must be > 0")
    checks, reports = run_checks(cfg.weights, cfg.tol)
    ok = all(c.passed for c in checks)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "passed": ok,
        "checks": [c.to_dict() for c in checks],
        "resolution": [
            dict(r.to_dict(), scalar_ratio=r.common_scalar) for r in reports
        ],
    }
    if cfg.out is not None:
        Path(cfg.out).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if (cfg.fmt or "table") == "json":
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        for c in checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"{status}  {c.name:<34} {c.metric:10.3e} <= {c.tolerance:.1e}  {c.detail}")
    if not ok:
        first = next(c for c in checks if not c.passed)
        print(f"verification failed: {first.name}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_coeffs(cfg: RunConfig) -> int:
    specs = cfg.specs()
    if len(specs) != 1:
        raise ConfigError("coeffs takes exactly one --k")
    if cfg.z is None:
        raise ConfigError("coeffs needs --z")
    spec = specs[0]
    tol = cfg.sweep_tol()
    state = build_state(cfg.z, spec, tol)
    probs = state.probabilities
    cumulative = np.cumsum(probs)
    fmt = cfg.fmt or "table"
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": "coeffs",
            "k": spec.k_label,
            "gamma": spec.gamma,
            "z": [cfg.z.real, cfg.z.imag],
            "n_max": state.truncation,
            "tail_bound": state.tail_bound,
            "probabilities": [float(p) for p in probs],
        }
        _write(json.dumps(doc, indent=2, sort_keys=True) + "\n", cfg.out)
        return EXIT_OK
    if fmt == "csv":
        lines = ["n,prob,cumulative"]
        lines += [f"{n},{float(p)!r},{float(c)!r}" for n, (p, c) in enumerate(zip(probs, cumulative))]
    else:
        lines = [f"# k={spec.k_label} gamma={spec.gamma:g} z={cfg.z} n_max={state.truncation} "
                 f"tail_bound={state.tail_bound:.3e}",
                 f"{'n':>6}  {'|c_n|^2':>22}  {'cumulative':>22}"]
        lines += [f"{n:>6}  {p:22.15e}  {c:22.15f}" for n, (p, c) in enumerate(zip(probs, cumulative))]
    _write("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "qsweep": cmd_qsweep,
    "verify": cmd_verify,
    "verify-identity": cmd_verify,
    "coeffs": cmd_coeffs,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gha-coherent",
        description="Coherent states of power-law potentials: spectra, Mandel Q sweeps "
        "and numerical verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, k=True):
        p.add_argument("--config", help="TOML file of key = value defaults; flags override")
        if k:
            p.add_argument("--k", action="append", help="power-law exponent, or 'inf' (repeatable)")
            p.add_argument("--gamma", type=float, help="Maslov index (default 4)")
        p.add_argument("--tol", type=float)
        p.add_argument("--out", help="output path")
        return p

    p = common(sub.add_parser("spectrum", help="WKB levels and spacing class"))
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--format", choices=("table", "csv", "json"))
    p.add_argument("--physical", action="store_true", help="multiply by omega(k)")
    p.add_argument("--v0", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--mass", type=float)

    p = common(sub.add_parser("qsweep", help="Mandel Q over a |z| grid"))
    p.add_argument("--z", dest="z_grid", help=f"min:max:count (default {DEFAULT_GRID})")
    p.add_argument("--log-grid", action="store_true")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--emit-plot-script", action="store_true",
                   help="write a gnuplot script next to the CSV output")

    p = common(sub.add_parser("verify", aliases=["verify-identity"],
                                  help="run the verification suite"), k=False)
    p.add_argument("--weight", action="append", choices=WEIGHT_LABELS)
    p.add_argument("--format", choices=("table", "json"))

    p = common(sub.add_parser("coeffs", help="photon-number distribution of |z,k>"))
    p.add_argument("--z", help="complex label, e.g. 2 or 1+1j")
    p.add_argument("--format", choices=("table", "csv", "json"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except (TailNotConverged, NoConvergence) as exc:
        print(f"error: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
