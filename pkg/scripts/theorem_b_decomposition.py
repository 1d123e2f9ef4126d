"""Split the Theorem B modified sum into A_n + C_n + D_n along a dyadic schedule."""

import argparse
from dataclasses import dataclass

from modriemann import LEFT, Interval, RealFunction, Weight, length_phi, theorem_b_diagnostics, uniform_partition


@dataclass(frozen=True)
class Config:
    f: str = "x^2"
    psi: str = "1 + x"
    phi: str = "sin(t)"
    kmin: int = 4
    kmax: int = 14


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    for name, default in vars(Config()).items():
        ap.add_argument(f"--{name}", type=type(default), default=default)
    cfg = Config(**vars(ap.parse_args()))

    unit = Interval(0.0, 1.0)
    f = RealFunction.parse(cfg.f)
    w = Weight.from_text(cfg.psi, unit)
    m = length_phi(RealFunction.parse(cfg.phi, "t"), 0.0, "right", unit)
    print(f"phi'(0+) ~ {m.slope:.12f}")
    print(f"{'n':>7s} {'s':>14s} {'A_n':>11s} {'A bound':>11s} {'C_n':>11s} {'D_n':>14s} {'residual':>10s}")
    for k in range(cfg.kmin, cfg.kmax + 1):
        d = theorem_b_diagnostics(f, w, m, uniform_partition(unit, 2**k), LEFT)
        print(
            f"{d.n:7d} {d.s_val:14.10f} {d.A_n:11.3e} {d.A_bound:11.3e} {d.C_n:11.3e} {d.D_n:14.10f} {d.residual:10.1e}"
        )


if __name__ == "__main__":
    main()
