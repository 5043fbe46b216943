"""Mandel Q curves for a set of power-law exponents.

    python scripts/q_sweep.py --preset loose --out results/loose
    python scripts/q_sweep.py --preset tight --out results/tight

Writes one CSV per exponent plus a small summary of signs and sign changes.
"""
import argparse
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from gha_coherent import PowerLawSpec, q_curve

PRESETS = {
    "loose": (0.5, 1.0, 1.5),
    "tight": (5.0, 15.0, math.inf),
}


@dataclass
class SweepConfig:
    ks: tuple = PRESETS["loose"]
    gamma: float = 4.0
    z_min: float = 0.1
    z_max: float = 10.0
    count: int = 100
    tol: float = 1e-14
    out: Path = field(default_factory=lambda: Path("results"))

    def grid(self):
        return np.linspace(self.z_min, self.z_max, self.count)


def run(cfg: SweepConfig):
    cfg.out.mkdir(parents=True, exist_ok=True)
    summary = []
    for k in cfg.ks:
        spec = PowerLawSpec(k, cfg.gamma)
        curve = q_curve(spec, cfg.grid(), cfg.tol)
        path = cfg.out / f"q_k{spec.k_label}.csv"
        path.write_text(curve.to_csv())
        q = curve.q
        summary.append((spec.k_label, q[0], q[-1], float(q.min()), float(q.max()), curve.sign_changes()))
    return summary


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--preset", choices=sorted(PRESETS), default="loose")
    ap.add_argument("--gamma", type=float, default=4.0)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    cfg = SweepConfig(ks=PRESETS[args.preset], gamma=args.gamma, count=args.count, out=args.out)
    print(f"{'k':>5} {'Q(first)':>12} {'Q(last)':>12} {'min':>12} {'max':>12} {'changes':>8}")
    for row in run(cfg):
        print(f"{row[0]:>5} {row[1]:12.5g} {row[2]:12.5g} {row[3]:12.5g} {row[4]:12.5g} {row[5]:>8}")


if __name__ == "__main__":
    main()
