"""Square-wave gated integration as the carrier frequency grows."""

import argparse
from dataclasses import dataclass

from modriemann import Interval, RealFunction, Weight, oracle_integral
from modriemann.signal import GatedSignalSpec, gated_integral, gated_integral_reference


@dataclass(frozen=True)
class Config:
    signal: str = "exp(x)"
    duty: float = 0.5
    kmin: int = 2
    kmax: int = 14


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--signal", default=Config.signal)
    ap.add_argument("--duty", type=float, default=Config.duty)
    ap.add_argument("--kmin", type=int, default=Config.kmin)
    ap.add_argument("--kmax", type=int, default=Config.kmax)
    cfg = Config(**vars(ap.parse_args()))

    w = Weight.uniform(Interval(0.0, 1.0))
    f = RealFunction.parse(cfg.signal)
    limit = cfg.duty * oracle_integral(f, w).midpoint
    print(f"signal {cfg.signal!r}, duty {cfg.duty}, duty * integral = {limit:.10f}")
    print(f"{'carrier_n':>10s} {'left sample':>14s} {'per-gate ref':>14s} {'error':>10s}")
    for k in range(cfg.kmin, cfg.kmax + 1):
        spec = GatedSignalSpec(f, 2**k, cfg.duty)
        s = gated_integral(spec, w)
        ref = gated_integral_reference(spec, w, subcells=64)
        print(f"{2**k:10d} {s:14.10f} {ref:14.10f} {abs(s - limit):10.2e}")


if __name__ == "__main__":
    main()
