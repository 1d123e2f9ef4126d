"""Integration of a baseband signal gated by an ideal unit square-wave carrier.

With ``carrier_n`` carrier periods across I and duty cycle ``duty``, the
signal is only integrated over the first ``duty`` fraction of every period.
Sampling each gate at its left end is exactly the modified sum for the
``GammaLeft(duty)`` map on the uniform ``carrier_n``-cell partition, which is
what ``gated_integral`` computes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import LEFT, uniform_partition
from .errors import InvalidArgument
from .mapping import gamma_left
from .modsum import DEFAULT_TOL, ConvergenceReport, convergence_study, modified_sums
from .stieltjes import RealFunction, Weight


@dataclass(frozen=True)
class GatedSignalSpec:
    f: RealFunction
    carrier_n: int
    duty: float

    def __post_init__(self):
        if int(self.carrier_n) != self.carrier_n or self.carrier_n < 1:
            raise InvalidArgument(f"carrier_n must be a positive integer, got {self.carrier_n!r}")
        if not 0 < self.duty < 1:
            raise InvalidArgument(f"duty must lie in (0, 1), got {self.duty!r}")


def gated_integral(spec: GatedSignalSpec, w: Weight) -> float:
    p = uniform_partition(w.base, spec.carrier_n)
    return modified_sums(spec.f, w, p, gamma_left(spec.duty), LEFT).s_val


def gated_integral_reference(spec: GatedSignalSpec, w: Weight, subcells: int = 256) -> float:
    """Same gates, but each one integrated by a fine midpoint rule instead of one left sample.

    Exact for f linear and psi constant; used for comparison tables.
    """
    p = uniform_partition(w.base, spec.carrier_n)
    lo = p.lo
    hi = lo + spec.duty * p.widths()
    t = np.arange(subcells + 1) / subcells
    edges = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    edges[:, -1] = hi
    a, b = edges[:, :-1].ravel(), edges[:, 1:].ravel()
    return math.fsum(spec.f(0.5 * (a + b)) * w.length(a, b))


def retrieval_study(
    f: RealFunction,
    w: Weight,
    carrier_ns: Sequence[int],
    duty: float,
    tol: float = DEFAULT_TOL,
    workers: Optional[int] = None,
) -> ConvergenceReport:
    """Gated integrals as the carrier frequency grows, against duty * int f psi."""
    for n in carrier_ns:
        GatedSignalSpec(f, n, duty)
    return convergence_study(f, w, gamma_left(duty), carrier_ns, LEFT, tol, workers)
