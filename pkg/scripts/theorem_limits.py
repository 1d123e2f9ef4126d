"""Convergence of modified sums for one setup per map kind, against the oracle limit."""

import argparse
from dataclasses import dataclass

from modriemann import (
    MID,
    Interval,
    RealFunction,
    Weight,
    convergence_study,
    gamma_left,
    length_phi,
    lipschitz_image,
    weighted_target_c,
    weighted_target_d,
)


@dataclass(frozen=True)
class Config:
    kmin: int = 4
    kmax: int = 12
    tol: float = 1e-3
    workers: int = 0


def cases():
    unit = Interval(0.0, 1.0)
    flat = Weight.uniform(unit)
    ramp = Weight.from_text("1 + x", unit)
    x = RealFunction.parse("x", lipschitz=1)
    x2 = RealFunction.parse("x^2", lipschitz=2)
    two = RealFunction.constant(2.0)
    sin_t = RealFunction.parse("sin(t)", "t")
    yield "gamma=1/2, f=1+cos/2", RealFunction.parse("1 + 0.5*cos(2*pi*x)", lipschitz=3.2), flat, gamma_left(0.5)
    yield "B: phi=sin, f=x^2, psi=1+x", x2, ramp, length_phi(sin_t, 0.0, "right", unit)
    yield "C: lambda=2+x, gamma=1/2, f=x", x, flat, weighted_target_c(RealFunction.parse("2 + x"), 0.5, flat)
    yield "D: lambda=2, gamma=1/2, f=x^2", x2, flat, weighted_target_d(two, 0.5, flat)
    yield "E: Lambda=x/2, f=x", x, flat, lipschitz_image(RealFunction.parse("x/2"), unit)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmin", type=int, default=Config.kmin)
    ap.add_argument("--kmax", type=int, default=Config.kmax)
    ap.add_argument("--tol", type=float, default=Config.tol)
    ap.add_argument("--workers", type=int, default=Config.workers)
    cfg = Config(**vars(ap.parse_args()))
    schedule = [2**k for k in range(cfg.kmin, cfg.kmax + 1)]

    print(f"{'case':34s} {'limit':>12s} {'s(final)':>12s} {'error':>10s} {'rate':>7s}  verdict")
    for name, f, w, m in cases():
        rep = convergence_study(f, w, m, schedule, MID, cfg.tol, workers=cfg.workers or None)
        print(
            f"{name:34s} {rep.predicted:12.8f} {rep.sums[-1]:12.8f} {rep.abs_errors[-1]:10.2e} "
            f"{rep.fitted_rate:7.2f}  {rep.verdict}{'' if rep.dominated else ' (gap not dominated)'}"
        )


if __name__ == "__main__":
    main()
