"""Modified Riemann sums over mapped cells, their predicted limits, and studies.

For a partition {I_k} and a map Phi the modified sums are

    u = sum sup_{I_k^1} f * |I_k^1|_Psi,   l = (same with inf),
    s = sum f(x_k^1) * |I_k^1|_Psi,        x_k^1 in I_k^1 = Phi(I_k).

Sup/inf on an image are the sampled estimates of ``cell_bounds`` clamped to
the estimates on the source cell (the image lies inside it) and widened to
contain f(x_k^1).  With that, l <= s <= u holds exactly, and for certified
integrands the modified gap never exceeds the classic one on the same
partition.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import Partition, SamplePointRule, pairwise_sum, sample_points, uniform_partition
from .errors import InvalidArgument, ScheduleTooCoarse
from .mapping import GammaLeft, IntervalMap, LengthPhi, LipschitzImage, WeightedTargetC, WeightedTargetD
from .stieltjes import ORACLE_CELLS, RealFunction, Weight, cell_bounds, oracle_integral, oscillation_sum

DEFAULT_TOL = 1e-3


@dataclass(frozen=True)
class ModifiedSumReport:
    u_val: float
    l_val: float
    s_val: float
    n_cells: int
    mesh: float
    skipped_empty: int
    osc_val: float = 0.0  # sum of (sup - inf) * |I_k^1|_Psi, i.e. u - l without cancellation
    certified: bool = False


def _modified_terms(f: RealFunction, w: Weight, p: Partition, m: IntervalMap, rule: SamplePointRule):
    a, b = m.map_cells(p.lo, p.hi)
    empty = ~(b > a)
    lens = np.where(empty, 0.0, w.length(a, b))
    fx = np.where(empty, 0.0, f(sample_points(rule, a, b)))
    sup1, inf1, cert = cell_bounds(f, a, b)
    sup0, inf0, _ = cell_bounds(f, p.lo, p.hi)
    sup1 = np.where(empty, 0.0, np.maximum(np.minimum(sup1, sup0), fx))
    inf1 = np.where(empty, 0.0, np.minimum(np.maximum(inf1, inf0), fx))
    return a, b, empty, lens, fx, sup1, inf1, cert


def modified_sums(
    f: RealFunction, w: Weight, p: Partition, m: IntervalMap, rule: SamplePointRule
) -> ModifiedSumReport:
    _, _, empty, lens, fx, sup1, inf1, cert = _modified_terms(f, w, p, m, rule)
    return ModifiedSumReport(
        u_val=pairwise_sum(sup1 * lens),
        l_val=pairwise_sum(inf1 * lens),
        s_val=pairwise_sum(fx * lens),
        n_cells=p.n,
        mesh=p.mesh,
        skipped_empty=int(np.count_nonzero(empty)),
        osc_val=pairwise_sum((sup1 - inf1) * lens),
        certified=cert,
    )


# ---------------------------------------------------------------- limits


@dataclass(frozen=True)
class LimitPrediction:
    theorem: str  # "B", "C", "D", "E" or "Gamma"
    value: float
    factor: float
    oracle_bracket: Tuple[float, float]


def _density(w: Weight) -> RealFunction:
    if w.psi is None:
        raise InvalidArgument("this limit needs a weight with a density psi")
    return w.psi


def predict_limit(f: RealFunction, w: Weight, m: IntervalMap, n_oracle: int = ORACLE_CELLS) -> LimitPrediction:
    """Theorem-specific limit of the modified sums, computed from the brute-force oracle.

    ``f`` is always the plain integrand: for the Theorem C map the sums are
    taken of ``f * lambda`` and for Theorem D against the weight built from
    ``lambda * psi``, but the limit is gamma * int f dPsi in both cases.
    """
    base = w.base
    if isinstance(m, (GammaLeft, LengthPhi)):
        factor = m.gamma if isinstance(m, GammaLeft) else m.slope
        fpsi = f.times(_density(w), base)
        orc = oracle_integral(fpsi, Weight.uniform(base), n_oracle)
        theorem = "Gamma" if isinstance(m, GammaLeft) else "B"
    elif isinstance(m, (WeightedTargetC, WeightedTargetD)):
        factor = m.gamma
        orc = oracle_integral(f, w, n_oracle)
        theorem = "C" if isinstance(m, WeightedTargetC) else "D"
    elif isinstance(m, LipschitzImage):
        factor = 1.0
        fpsi = f.times(_density(w), base)
        orc = oracle_integral(fpsi, Weight.integrator(m.Lam, base), n_oracle)
        theorem = "E"
    else:
        raise InvalidArgument(f"no limit formula for map kind {m.kind!r}")
    lo, hi = sorted((factor * orc.lower, factor * orc.upper))
    return LimitPrediction(theorem, factor * orc.midpoint, float(factor), (lo, hi))


def study_inputs(f: RealFunction, w: Weight, m: IntervalMap) -> Tuple[RealFunction, Weight]:
    """The (integrand, weight) pair whose modified sums a study follows."""
    if isinstance(m, WeightedTargetC):
        return f.times(m.lam, w.base), w
    if isinstance(m, WeightedTargetD):
        return f, m.upsilon
    return f, w


# ---------------------------------------------------------------- studies


@dataclass(frozen=True)
class StudyRow:
    n: int
    mesh: float
    s: float
    u: float
    l: float
    gap: float
    UL_gap: float
    predicted: float
    abs_error: float

    @property
    def dominated(self) -> bool:
        return self.gap <= self.UL_gap


@dataclass(frozen=True)
class ConvergenceReport:
    schedule: Tuple[int, ...]
    sums: Tuple[float, ...]
    gaps: Tuple[float, ...]
    UL_gaps: Tuple[float, ...]
    predicted: float
    abs_errors: Tuple[float, ...]
    fitted_rate: float
    verdict: str
    tol: float
    prediction: LimitPrediction
    rows: Tuple[StudyRow, ...]

    @property
    def converged(self) -> bool:
        return self.verdict == "converged"

    @property
    def dominated(self) -> bool:
        """u - l <= U - L at every n of the schedule."""
        return all(r.dominated for r in self.rows)

    def gaps_monotone(self, slack: float = 0.10) -> bool:
        """Gaps over the schedule tail never grow by more than ``slack``."""
        g = self.gaps[len(self.gaps) // 2 :]
        return all(b <= a * (1 + slack) + 1e-15 for a, b in zip(g, g[1:]))


def worker_count() -> int:
    """Worker cap from MODSUM_THREADS (0 or unset means one per CPU)."""
    raw = os.environ.get("MODSUM_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise InvalidArgument(f"MODSUM_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise InvalidArgument("MODSUM_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


def fit_rate(schedule: Sequence[int], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(n) over the last half."""
    k = len(schedule) // 2
    n = np.asarray(schedule[k:], dtype=float)
    e = np.asarray(errors[k:], dtype=float)
    if n.size < 2 or np.any(e <= 0):
        return math.nan
    return float(np.polyfit(np.log(n), np.log(e), 1)[0])


def convergence_study(
    f: RealFunction,
    w: Weight,
    m: IntervalMap,
    schedule: Sequence[int],
    rule: SamplePointRule,
    tol: float = DEFAULT_TOL,
    workers: Optional[int] = None,
    prediction: Optional[LimitPrediction] = None,
) -> ConvergenceReport:
    schedule = tuple(int(n) for n in schedule)
    if not schedule or any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InvalidArgument(f"schedule must be non-empty and increasing, got {schedule}")
    width = w.base.width()
    for n in schedule:
        if not width / n < m.eta:
            raise ScheduleTooCoarse(f"n={n} gives mesh {width / n!r}, not below eta={m.eta!r}")
    if prediction is None:
        prediction = predict_limit(f, w, m)
    g, wg = study_inputs(f, w, m)

    def one(n: int) -> StudyRow:
        p = uniform_partition(w.base, n)
        r = modified_sums(g, wg, p, m, rule)
        return StudyRow(
            n=n,
            mesh=p.mesh,
            s=r.s_val,
            u=r.u_val,
            l=r.l_val,
            gap=r.osc_val,
            UL_gap=oscillation_sum(g, wg, p),
            predicted=prediction.value,
            abs_error=abs(r.s_val - prediction.value),
        )

    nw = worker_count() if workers is None else max(1, int(workers))
    if nw == 1 or len(schedule) == 1:
        rows = tuple(one(n) for n in schedule)
    else:
        with ThreadPoolExecutor(max_workers=min(nw, len(schedule))) as ex:
            rows = tuple(ex.map(one, schedule))
    errors = tuple(r.abs_error for r in rows)
    ok = errors[-1] <= tol * max(1.0, abs(prediction.value))
    return ConvergenceReport(
        schedule=schedule,
        sums=tuple(r.s for r in rows),
        gaps=tuple(r.gap for r in rows),
        UL_gaps=tuple(r.UL_gap for r in rows),
        predicted=prediction.value,
        abs_errors=errors,
        fitted_rate=fit_rate(schedule, errors),
        verdict="converged" if ok else "inconclusive",
        tol=tol,
        prediction=prediction,
        rows=rows,
    )


# ---------------------------------------------------------------- Theorem B


@dataclass(frozen=True)
class BDiagnostics:
    n: int
    s_val: float
    A_n: float
    C_n: float
    D_n: float
    A_bound: float  # M_f * sum osc(psi, I_k) |I_k|

    @property
    def residual(self) -> float:
        return self.s_val - (self.A_n + self.C_n + self.D_n)


def theorem_b_diagnostics(
    f: RealFunction, w: Weight, m: LengthPhi, p: Partition, rule: SamplePointRule
) -> BDiagnostics:
    """Split s into A_n + C_n + D_n.

    A_n = sum f(x1) int_{I1} (psi - psi(x1))       density variation on the image
    C_n = sum f psi(x1) (phi(alpha+|I|)/|I| - phi') |I|   difference-quotient error
    D_n = phi' sum f psi(x1) |I|                   a Riemann sum of f psi
    """
    if not isinstance(m, LengthPhi):
        raise InvalidArgument("Theorem B diagnostics need a lengthphi map")
    psi = _density(w)
    a, b, empty, lens, fx, _, _, _ = _modified_terms(f, w, p, m, rule)
    x1 = sample_points(rule, a, b)
    psix = np.where(empty, 0.0, psi(x1))
    widths = p.widths()
    img_w = b - a
    fpsi = fx * psix
    A = pairwise_sum(fx * (lens - psix * img_w))
    C = pairwise_sum(fpsi * (m.lengths(widths) / widths - m.slope) * widths)
    D = m.slope * pairwise_sum(fpsi * widths)
    sup, inf, _ = cell_bounds(psi, p.lo, p.hi)
    bound = f.bound_on(w.base) * pairwise_sum((sup - inf) * widths)
    return BDiagnostics(p.n, pairwise_sum(fx * lens), A, C, D, bound)
