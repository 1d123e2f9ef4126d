"""Classic Riemann-Stieltjes sums against an integrator Psi = Psi(a) + int psi.

Suprema and infima over a cell are estimated by sampling ``m`` equispaced
points (both endpoints included).  When the integrand declares a Lipschitz
constant ``L`` the estimates are widened by ``L * width / (m - 1)`` and the
resulting report is *certified*; otherwise it is only an estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import expr
from .core import Interval, Partition, SamplePointRule, pairwise_sum, sample_points, uniform_partition
from .errors import HypothesisViolation, InvalidArgument

SUP_SAMPLES = 17
TABLE_CELLS = 2**18
ORACLE_CELLS = 2**16
_CHUNK = 1 << 15


@dataclass(frozen=True, eq=False)
class RealFunction:
    """A vectorized real function with optional declared bound and Lipschitz constant."""

    fn: Callable
    lipschitz: Optional[float] = None
    bound: Optional[float] = None
    text: str = "<callable>"
    ast: Optional[expr.Node] = None

    @classmethod
    def parse(cls, text: str, variable: str = "x", lipschitz=None, bound=None) -> "RealFunction":
        node = expr.parse(text, variable)
        return cls(expr.compile_expr(node), lipschitz, bound, text, node)

    @classmethod
    def constant(cls, c: float) -> "RealFunction":
        c = float(c)
        return cls(lambda x: np.full(np.shape(x), c), 0.0, abs(c), repr(c), None)

    @property
    def is_constant(self) -> bool:
        return self.ast is not None and expr.is_constant(self.ast) or self.lipschitz == 0.0

    def __call__(self, x):
        if np.ndim(x) == 0:
            return float(np.asarray(self.fn(np.array([float(x)])), dtype=float).ravel()[0])
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.fn(x), dtype=float), x.shape)

    def bound_on(self, interval: Interval, samples: int = 4097) -> float:
        """Declared M_f, or a sampled estimate of sup |f| when none was declared."""
        if self.bound is not None:
            return float(self.bound)
        x = np.linspace(interval.lo, interval.hi, samples)
        return float(np.max(np.abs(self(x))))

    def times(self, other: "RealFunction", interval: Optional[Interval] = None) -> "RealFunction":
        lip = None
        if self.lipschitz is not None and other.lipschitz is not None and interval is not None:
            lip = self.lipschitz * other.bound_on(interval) + other.lipschitz * self.bound_on(interval)
        bound = None
        if self.bound is not None and other.bound is not None:
            bound = self.bound * other.bound
        f, g = self.fn, other.fn
        return RealFunction(
            lambda x: np.asarray(f(x), dtype=float) * np.asarray(g(x), dtype=float),
            lip,
            bound,
            f"({self.text})*({other.text})",
        )

    def check(self, interval: Interval, samples: int = 1025, rtol: float = 1e-9) -> None:
        """Sample-check the declared bound and Lipschitz constant."""
        x = np.linspace(interval.lo, interval.hi, samples)
        y = self(x)
        if self.bound is not None:
            bad = np.abs(y) > self.bound * (1 + rtol) + rtol
            if np.any(bad):
                raise HypothesisViolation("|f| <= M_f", float(x[bad][0]))
        if self.lipschitz is not None:
            slope = np.abs(np.diff(y)) / np.diff(x)
            bad = slope > self.lipschitz * (1 + rtol) + rtol
            if np.any(bad):
                k = int(np.argmax(bad))
                raise HypothesisViolation("Lipschitz constant L_f", (float(x[k]), float(x[k + 1])))

    def __repr__(self):
        return f"RealFunction({self.text!r}, L={self.lipschitz}, M={self.bound})"


class Weight:
    """An increasing integrator on ``base``.

    Normally built from a positive density ``psi``; ``Psi`` is then either the
    supplied closed form or a cumulative midpoint table on ``TABLE_CELLS``
    uniform cells, interpolated linearly.  ``Weight.integrator`` builds a bare
    nondecreasing integrator with no density (used for d-Lambda integrals).
    """

    def __init__(
        self,
        psi: Optional[RealFunction],
        base: Interval,
        anchor: float = 0.0,
        cumulative: Optional[Callable] = None,
        table_cells: int = TABLE_CELLS,
        validate: bool = True,
    ):
        if psi is None and cumulative is None:
            raise InvalidArgument("a weight needs a density or a cumulative function")
        self.psi = psi
        self.base = base
        self.anchor = float(anchor)
        self._cumulative = cumulative
        self.table_cells = int(table_cells)
        if validate:
            self._validate()

    @classmethod
    def uniform(cls, base: Interval, c: float = 1.0) -> "Weight":
        a = base.lo
        return cls(RealFunction.constant(c), base, cumulative=lambda x: c * (np.asarray(x, dtype=float) - a))

    @classmethod
    def from_text(cls, psi_text: str, base: Interval, Psi_text: Optional[str] = None, lipschitz=None) -> "Weight":
        psi = RealFunction.parse(psi_text, lipschitz=lipschitz)
        if Psi_text is not None:
            node = expr.parse(Psi_text)
            Psi0 = expr.evaluate(node, base.lo)
            return cls(psi, base, cumulative=lambda x: expr.evaluate(node, x) - Psi0)
        if expr.is_constant(psi.ast):
            return cls.uniform(base, expr.evaluate(psi.ast, 0.0))
        return cls(psi, base)

    @classmethod
    def integrator(cls, func: Callable, base: Interval) -> "Weight":
        """A Stieltjes integrator given directly by a nondecreasing ``func``."""
        f0 = float(np.asarray(func(np.array([base.lo])), dtype=float)[0])
        return cls(None, base, cumulative=lambda x: np.asarray(func(np.asarray(x, dtype=float)), dtype=float) - f0)

    def _validate(self):
        x = np.linspace(self.base.lo, self.base.hi, 4097)
        if self.psi is not None:
            y = self.psi(x)
            # a density may vanish at an endpoint (psi = 2x on [0, 1]) but not inside
            bad = y < 0
            bad[1:-1] |= y[1:-1] == 0
            if np.any(bad):
                raise HypothesisViolation("psi > 0", float(x[np.argmax(bad)]))
        else:
            c = self.Psi(x)
            d = np.diff(c)
            if np.any(d < -1e-12 * max(1.0, float(np.max(np.abs(c))))):
                raise HypothesisViolation("integrator nondecreasing", float(x[np.argmax(d < 0)]))

    @cached_property
    def _table(self):
        a, b = self.base.lo, self.base.hi
        n = self.table_cells
        nodes = a + (b - a) * (np.arange(n + 1) / n)
        nodes[-1] = b
        h = np.diff(nodes)
        mids = nodes[:-1] + 0.5 * h
        cum = np.empty(n + 1)
        cum[0] = 0.0
        np.cumsum(self.psi(mids) * h, out=cum[1:])
        return nodes, cum

    @property
    def closed_form(self) -> bool:
        return self._cumulative is not None

    def Psi(self, x):
        """Psi(x) - Psi(a) + anchor, vectorized."""
        if self._cumulative is not None:
            v = np.asarray(self._cumulative(np.asarray(x, dtype=float)), dtype=float)
        else:
            nodes, cum = self._table
            v = np.interp(x, nodes, cum)
        return self.anchor + v

    def length(self, lo, hi) -> np.ndarray:
        """Psi-lengths of ``[lo[k], hi[k]]``; zero for zero-width cells."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        d = np.asarray(self.Psi(hi) - self.Psi(lo), dtype=float)
        return np.where(hi > lo, np.maximum(d, 0.0), 0.0)

    def total(self) -> float:
        return float(self.length(np.array([self.base.lo]), np.array([self.base.hi]))[0])

    def psi_bound(self) -> float:
        """M_psi, declared or sampled."""
        if self.psi is None:
            raise InvalidArgument("bare integrator has no density")
        return self.psi.bound_on(self.base)

    def times(self, lam: RealFunction) -> "Weight":
        """The weight whose density is ``lam * psi`` (an indefinite integral of lam psi)."""
        if self.psi is None:
            raise InvalidArgument("bare integrator has no density")
        dens = lam.times(self.psi, self.base)
        if lam.is_constant and self.psi.is_constant:
            c = float(dens(self.base.lo))
            return Weight.uniform(self.base, c)
        return Weight(dens, self.base, table_cells=self.table_cells)

    def __repr__(self):
        kind = "closed-form" if self.closed_form else "tabulated"
        name = self.psi.text if self.psi is not None else "integrator"
        return f"Weight({name!r} on {self.base}, {kind})"


@dataclass(frozen=True)
class SumReport:
    lower: float
    upper: float
    sample_sum: float
    oscillation_sum: float
    n_cells: int
    mesh: float
    certified: bool = False


def psi_length(w: Weight, j: Interval) -> float:
    if not w.base.contains(j):
        raise InvalidArgument(f"{j} is not inside the base interval {w.base}")
    return float(w.length(np.array([j.lo]), np.array([j.hi]))[0])


def cell_bounds(f: RealFunction, lo, hi, m: int = SUP_SAMPLES):
    """Estimated (sup, inf) of ``f`` on each cell, and whether they are certified."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    t = np.arange(m) / (m - 1)
    sup = np.empty(lo.size)
    inf = np.empty(lo.size)
    for s in range(0, lo.size, _CHUNK):
        a, b = lo[s : s + _CHUNK], hi[s : s + _CHUNK]
        X = a[:, None] + (b - a)[:, None] * t[None, :]
        X[:, -1] = b
        Y = f(X)
        sup[s : s + _CHUNK] = Y.max(axis=1)
        inf[s : s + _CHUNK] = Y.min(axis=1)
    certified = f.lipschitz is not None
    if certified:
        pad = f.lipschitz * (hi - lo) / (m - 1)
        sup += pad
        inf -= pad
    return sup, inf, certified


def _darboux_terms(f, w, p):
    sup, inf, cert = cell_bounds(f, p.lo, p.hi)
    dpsi = w.length(p.lo, p.hi)
    return sup, inf, dpsi, cert


def upper_sum(f: RealFunction, w: Weight, p: Partition) -> float:
    sup, _, dpsi, _ = _darboux_terms(f, w, p)
    return pairwise_sum(sup * dpsi)


def lower_sum(f: RealFunction, w: Weight, p: Partition) -> float:
    _, inf, dpsi, _ = _darboux_terms(f, w, p)
    return pairwise_sum(inf * dpsi)


def oscillation_sum(f: RealFunction, w: Weight, p: Partition) -> float:
    sup, inf, dpsi, _ = _darboux_terms(f, w, p)
    return pairwise_sum((sup - inf) * dpsi)


def riemann_sum(f: RealFunction, w: Weight, p: Partition, rule: SamplePointRule) -> float:
    x = sample_points(rule, p.lo, p.hi)
    return pairwise_sum(f(x) * w.length(p.lo, p.hi))


def sum_report(f: RealFunction, w: Weight, p: Partition, rule: SamplePointRule) -> SumReport:
    """All four classic sums on one partition.

    The sampled value f(x_k) is folded into the cell's sup/inf so the report
    always brackets its own sample sum, even for uncertified estimates.
    """
    sup, inf, dpsi, cert = _darboux_terms(f, w, p)
    fx = f(sample_points(rule, p.lo, p.hi))
    sup = np.maximum(sup, fx)
    inf = np.minimum(inf, fx)
    return SumReport(
        lower=pairwise_sum(inf * dpsi),
        upper=pairwise_sum(sup * dpsi),
        sample_sum=pairwise_sum(fx * dpsi),
        oscillation_sum=pairwise_sum((sup - inf) * dpsi),
        n_cells=p.n,
        mesh=p.mesh,
        certified=cert,
    )


class RefineResult(NamedTuple):
    partition: Partition
    report: SumReport
    converged: bool


def refine_until(
    f: RealFunction,
    w: Weight,
    eps: float,
    n_cap: int = 2**22,
    rule: SamplePointRule = SamplePointRule("mid"),
) -> RefineResult:
    """First dyadic uniform partition (n = 2, 4, 8, ...) with U - L <= eps."""
    if not eps > 0:
        raise InvalidArgument(f"eps must be positive, got {eps!r}")
    n = 2
    while True:
        p = uniform_partition(w.base, n)
        rep = sum_report(f, w, p, rule)
        if rep.upper - rep.lower <= eps:
            return RefineResult(p, rep, True)
        if 2 * n > n_cap:
            return RefineResult(p, rep, False)
        n *= 2


class OracleResult(NamedTuple):
    lower: float
    upper: float
    midpoint: float

    @property
    def width(self) -> float:
        return self.upper - self.lower


def oracle_integral(
    g: RealFunction, w: Weight, n_oracle: int = ORACLE_CELLS, subsamples: int = 4
) -> OracleResult:
    """Brute-force reference for the integral of ``g`` against ``w``.

    Darboux bracket on ``n_oracle`` uniform cells (each probed at
    ``subsamples + 1`` points, widened by the Lipschitz constant when one is
    declared) plus the composite midpoint value.  Reductions use ``math.fsum``
    so the oracle shares no summation code with the sums it checks.
    """
    a, b = w.base.lo, w.base.hi
    k = int(subsamples)
    grid = a + (b - a) * (np.arange(n_oracle * k + 1) / (n_oracle * k))
    grid[-1] = b
    y = g(grid)
    edges = grid[::k]
    cells = np.lib.stride_tricks.sliding_window_view(y, k + 1)[::k]
    sup = cells.max(axis=1)
    inf = cells.min(axis=1)
    if g.lipschitz is not None:
        pad = g.lipschitz * (b - a) / (n_oracle * k)
        sup = sup + pad
        inf = inf - pad
    dpsi = w.length(edges[:-1], edges[1:])
    mids = 0.5 * (edges[:-1] + edges[1:])
    return OracleResult(
        lower=math.fsum(inf * dpsi),
        upper=math.fsum(sup * dpsi),
        midpoint=math.fsum(g(mids) * dpsi),
    )
