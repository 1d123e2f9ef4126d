"""Set mappings J -> J1 = Phi(J) used to build modified sums.

Every map here returns a single interval (possibly of zero width, which is
treated as empty) lying inside the source cell whenever the cell is
narrower than the map's contraction threshold ``eta``.  Maps are vectorized:
``images(lo, hi)`` handles all cells of a partition in one call, and
``apply_map`` is the single-cell view of the same code path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import Interval, unit_hash
from .errors import CellTooWide, DerivativeDisagreement, HypothesisViolation, InvalidArgument, NoSignChange
from .stieltjes import RealFunction, Weight

CHECK_SAMPLES = 256
ROOT_SCAN = 64
DERIV_STEPS = (1e-6, 1e-7)
DERIV_AGREE = 1e-4
DELTA_QUOTIENT_TOL = 0.1


class MultipleRootsWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Placement:
    """Where a length-only image sits inside its cell."""

    kind: str = "left"
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("left", "seeded"):
            raise InvalidArgument(f"unknown placement {self.kind!r}")
        if (self.kind == "seeded") != (self.seed is not None):
            raise InvalidArgument("a seed is required for, and only for, seeded placement")

    def __str__(self):
        return "left" if self.kind == "left" else f"seeded:{self.seed}"


LEFT_PLACEMENT = Placement()


def _place(placement: Placement, lo, hi, length):
    """Put an image of the given length inside each [lo, hi]."""
    if placement.kind == "left":
        start = lo
    else:
        u = unit_hash(placement.seed, np.zeros(lo.size, dtype=np.int64), lo, hi)
        start = lo + u * (hi - lo - length)
    return start, np.minimum(start + length, hi)


@dataclass(frozen=True, eq=False)
class IntervalMap:
    eta: float

    kind = "abstract"

    def images(self, lo: np.ndarray, hi: np.ndarray):
        raise NotImplementedError

    def check_widths(self, lo, hi):
        w = np.asarray(hi) - np.asarray(lo)
        if np.any(w >= self.eta):
            raise CellTooWide(
                f"{self.kind} map: cell of width {float(np.max(w))!r} is not below eta={self.eta!r}"
            )

    def map_cells(self, lo, hi):
        """Image bounds for every cell, after the contraction-threshold check."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        self.check_widths(lo, hi)
        img_lo, img_hi = self.images(lo, hi)
        img_lo = np.maximum(img_lo, lo)
        img_hi = np.minimum(np.maximum(img_hi, img_lo), hi)
        return img_lo, img_hi

    def describe(self) -> dict:
        return {"kind": self.kind, "eta": self.eta}


@dataclass(frozen=True, eq=False)
class GammaLeft(IntervalMap):
    gamma: float = 0.5

    kind = "gamma"

    def images(self, lo, hi):
        return lo, lo + self.gamma * (hi - lo)

    def describe(self):
        return {**super().describe(), "gamma": self.gamma}


@dataclass(frozen=True, eq=False)
class LengthPhi(IntervalMap):
    phi: RealFunction = None
    alpha: float = 0.0
    side: str = "right"
    window: Interval = None
    slope: float = math.nan  # phi'_+(alpha), or lim phi(alpha - t)/t for side="left"
    delta: float = math.nan
    placement: Placement = LEFT_PLACEMENT

    kind = "lengthphi"

    def lengths(self, widths):
        t = self.alpha + widths if self.side == "right" else self.alpha - widths
        return np.asarray(self.phi(t), dtype=float)

    def images(self, lo, hi):
        width = hi - lo
        length = self.lengths(width)
        if np.any(length < 0):
            k = int(np.argmax(length < 0))
            raise HypothesisViolation("phi >= 0", float(width[k]))
        over = length > width * (1 + 8 * np.finfo(float).eps)
        if np.any(over):
            k = int(np.argmax(over))
            cond = "phi(t) <= t - alpha" if self.side == "right" else "phi(t) <= alpha - t"
            raise HypothesisViolation(cond, float(width[k]))
        return _place(self.placement, lo, hi, np.minimum(length, width))

    def with_placement(self, placement: Placement) -> "LengthPhi":
        return LengthPhi(
            self.eta, self.phi, self.alpha, self.side, self.window, self.slope, self.delta, placement
        )

    def describe(self):
        return {
            **super().describe(),
            "phi": self.phi.text,
            "alpha": self.alpha,
            "side": self.side,
            "slope": self.slope,
            "delta": self.delta,
            "placement": str(self.placement),
        }


@dataclass(frozen=True, eq=False)
class WeightedTargetC(IntervalMap):
    lam: RealFunction = None
    gamma: float = 1.0
    weight: Weight = None
    tol: float = math.nan

    kind = "targetc"

    def images(self, lo, hi):
        w = self.weight
        Psi_c = w.Psi(lo)
        target = self.gamma * w.length(lo, hi)
        lam = self.lam

        def g(x, idx):
            return lam(x) * (w.Psi(x) - Psi_c[idx]) - target[idx]

        # smallest root: scan for the first sign change, then bisect inside it
        t = np.arange(ROOT_SCAN + 1) / ROOT_SCAN
        X = lo[:, None] + (hi - lo)[:, None] * t[None, :]
        X[:, -1] = hi
        idx = np.broadcast_to(np.arange(lo.size)[:, None], X.shape)
        G = g(X, idx)
        nonneg = G >= 0
        if not np.all(nonneg[:, -1]):
            k = int(np.argmin(nonneg[:, -1]))
            raise NoSignChange(
                f"targetc: lambda(c')*Psi[c,c'] = gamma*Psi(J) has no root in [{lo[k]!r}, {hi[k]!r}]"
            )
        changes = np.count_nonzero(np.diff(nonneg, axis=1), axis=1)
        if np.any(changes > 1):
            warnings.warn(
                f"targetc: {int(np.count_nonzero(changes > 1))} cell(s) show several sign changes; "
                "using the smallest root",
                MultipleRootsWarning,
                stacklevel=3,
            )
        first = np.argmax(nonneg, axis=1)
        rows = np.arange(lo.size)
        a = X[rows, np.maximum(first - 1, 0)]
        b = X[rows, first]
        root = bisect_many(lambda x: g(x, rows), a, b, self.tol)
        return lo, root

    def describe(self):
        return {**super().describe(), "lambda": self.lam.text, "gamma": self.gamma}


@dataclass(frozen=True, eq=False)
class WeightedTargetD(IntervalMap):
    lam: RealFunction = None
    gamma: float = 1.0
    weight: Weight = None
    upsilon: Weight = None
    tol: float = math.nan

    kind = "targetd"

    def images(self, lo, hi):
        w, ups = self.weight, self.upsilon
        Ups_c = ups.Psi(lo)
        target = self.gamma * w.length(lo, hi)
        rows = np.arange(lo.size)

        def g(x, idx=rows):
            return ups.Psi(x) - Ups_c[idx] - target[idx]

        if np.any(g(hi) < 0):
            k = int(np.argmax(g(hi) < 0))
            raise NoSignChange(
                f"targetd: Upsilon[c,c'] = gamma*Psi(J) has no root in [{lo[k]!r}, {hi[k]!r}] "
                "(lambda <= 1 somewhere?)"
            )
        return lo, bisect_many(g, lo.copy(), hi.copy(), self.tol)

    def describe(self):
        return {**super().describe(), "lambda": self.lam.text, "gamma": self.gamma}


@dataclass(frozen=True, eq=False)
class LipschitzImage(IntervalMap):
    Lam: RealFunction = None
    base: Interval = None

    kind = "lipschitz"

    def images(self, lo, hi):
        length = self.Lam(hi) - self.Lam(lo)
        slack = 1e-12 * self.base.width()
        over = length > (hi - lo) + slack
        if np.any(over) or np.any(length < -slack):
            k = int(np.argmax(over | (length < -slack)))
            raise HypothesisViolation(
                "Lambda nondecreasing and 1-Lipschitz", (float(lo[k]), float(hi[k]))
            )
        return lo, lo + np.clip(length, 0.0, hi - lo)

    def describe(self):
        return {**super().describe(), "Lambda": self.Lam.text}


@dataclass(frozen=True)
class CellImage:
    source: Interval
    image: Optional[Interval]
    psi_len: float


def apply_map(m: IntervalMap, w: Weight, j: Interval) -> CellImage:
    if not w.base.contains(j):
        raise InvalidArgument(f"{j} is not inside the base interval {w.base}")
    lo, hi = m.map_cells(np.array([j.lo]), np.array([j.hi]))
    if not hi[0] > lo[0]:
        return CellImage(j, None, 0.0)
    psi_len = float(w.length(lo, hi)[0])
    return CellImage(j, Interval(lo[0], hi[0]), psi_len)


def bisect_many(g: Callable, lo: np.ndarray, hi: np.ndarray, tol: float, max_iter: int = 200) -> np.ndarray:
    """Vectorized bisection; each bracket must satisfy g(lo) < 0 <= g(hi) or the reverse.

    Returns, per bracket, the end on the same side as ``hi`` once every
    bracket is narrower than ``tol``.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    s_lo = np.sign(g(lo))
    done = s_lo == 0
    hi = np.where(done, lo, hi)
    for _ in range(max_iter):
        active = ~done & (hi - lo >= tol)
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        # adjacent floats: the bracket cannot shrink further
        stuck = (mid <= lo) | (mid >= hi)
        done |= active & stuck
        step = active & ~stuck
        same = np.sign(g(mid)) == s_lo
        lo = np.where(step & same, mid, lo)
        hi = np.where(step & ~same, mid, hi)
    return hi


def solve_monotone(g: Callable[[float], float], bracket: Interval, tol: Optional[float] = None) -> float:
    """Root of a continuous ``g`` by bisection on ``bracket``; deterministic."""
    if tol is None:
        tol = 1e-13 * max(bracket.width(), np.finfo(float).tiny)
    ga, gb = g(bracket.lo), g(bracket.hi)
    if ga * gb > 0:
        raise NoSignChange(f"no sign change on {bracket}: g(lo)={ga!r}, g(hi)={gb!r}")
    if ga == 0:
        return bracket.lo
    if gb == 0:
        return bracket.hi

    def gv(x):
        return np.array([g(float(v)) for v in np.ravel(x)])

    return float(bisect_many(gv, np.array([bracket.lo]), np.array([bracket.hi]), tol)[0])


# ---------------------------------------------------------------- constructors


def gamma_left(gamma: float, eta: float = math.inf) -> GammaLeft:
    """Left-anchored image of relative length ``gamma``; contraction holds for every cell."""
    gamma = float(gamma)
    if not 0 < gamma < 1:
        raise InvalidArgument(f"gamma must lie in (0, 1), got {gamma!r}")
    if not eta > 0:
        raise InvalidArgument(f"eta must be positive, got {eta!r}")
    return GammaLeft(eta=float(eta), gamma=gamma)


def _quotient(phi, alpha, side, h):
    if side == "right":
        return (phi(alpha + h) - phi(alpha)) / h
    return (phi(alpha - h) - phi(alpha)) / h


def length_phi(
    phi: RealFunction,
    alpha: float,
    side: str = "right",
    window: Optional[Interval] = None,
    placement: Placement = LEFT_PLACEMENT,
) -> LengthPhi:
    """Map whose image length is ``phi(alpha + |J|)`` (right) or ``phi(alpha - |J|)`` (left).

    ``window`` is ``[alpha, beta]`` for the right variant and ``[beta, alpha]``
    for the left one; the hypotheses are checked on CHECK_SAMPLES points of it.
    The limit factor is estimated by one-sided difference quotients at 1e-6
    and 1e-7.  For side="left" the factor is ``lim phi(alpha - t)/t``, which
    is ``-phi'_-(alpha)``: the left derivative itself is <= 0 because phi >= 0
    and phi(alpha) = 0.
    """
    alpha = float(alpha)
    if side not in ("right", "left"):
        raise InvalidArgument(f"side must be 'right' or 'left', got {side!r}")
    if window is None:
        raise InvalidArgument("length_phi needs a window")
    if (side == "right" and window.lo != alpha) or (side == "left" and window.hi != alpha):
        raise InvalidArgument(f"window {window} must have alpha={alpha!r} as its {'lower' if side == 'right' else 'upper'} end")
    span = window.width()
    if not span > 0:
        raise InvalidArgument("window must have positive width")

    phi_alpha = phi(alpha)
    if abs(phi_alpha) > 1e-12:
        raise HypothesisViolation("φ(α)=0", alpha, f"φ(α)={phi_alpha!r}")

    s = np.arange(1, CHECK_SAMPLES + 1) / CHECK_SAMPLES * span
    t = alpha + s if side == "right" else alpha - s
    vals = phi(t)
    bad = vals < 0
    if np.any(bad):
        raise HypothesisViolation("φ(t) >= 0", float(t[np.argmax(bad)]))
    bad = vals > s * (1 + 1e-12)
    if np.any(bad):
        cond = "φ(t) <= t-α" if side == "right" else "φ(t) <= α-t"
        raise HypothesisViolation(cond, float(t[np.argmax(bad)]))

    q1, q2 = (_quotient(phi, alpha, side, h) for h in DERIV_STEPS)
    if not (math.isfinite(q1) and math.isfinite(q2)) or abs(q1 - q2) > DERIV_AGREE:
        raise DerivativeDisagreement(
            "one-sided derivative at α", alpha, f"quotients {q1!r} (h=1e-6) and {q2!r} (h=1e-7) disagree"
        )
    slope = q1

    # delta: largest sampled offset below which the quotient stays within 0.1 of the slope
    probe = np.unique(np.concatenate([span * 2.0 ** -np.arange(1, 41), s]))
    tp = alpha + probe if side == "right" else alpha - probe
    qp = (phi(tp) - phi_alpha) / probe
    ok = np.abs(qp - slope) <= DELTA_QUOTIENT_TOL
    first_bad = int(np.argmin(ok)) if not np.all(ok) else probe.size
    delta = float(probe[first_bad - 1]) if first_bad > 0 else float(probe[0])
    eta = min(delta, span)
    return LengthPhi(
        eta=eta,
        phi=phi,
        alpha=alpha,
        side=side,
        window=window,
        slope=float(slope),
        delta=delta,
        placement=placement,
    )


def _check_lambda_and_gamma(lam: RealFunction, gamma: float, base: Interval):
    gamma = float(gamma)
    if not 0 < gamma <= 1:
        raise InvalidArgument(f"gamma must lie in (0, 1], got {gamma!r}")
    x = np.linspace(base.lo, base.hi, 4097)
    y = lam(x)
    bad = ~(y > 1)
    if np.any(bad):
        raise HypothesisViolation("λ > 1 on I", float(x[np.argmax(bad)]))
    return gamma


def weighted_target_c(lam: RealFunction, gamma: float, w: Weight, tol: Optional[float] = None) -> WeightedTargetC:
    """Images ``[c, c']`` with ``lam(c') * |[c, c']|_Psi = gamma * |J|_Psi``."""
    gamma = _check_lambda_and_gamma(lam, gamma, w.base)
    tol = 1e-13 * w.base.width() if tol is None else float(tol)
    return WeightedTargetC(eta=math.inf, lam=lam, gamma=gamma, weight=w, tol=tol)


def weighted_target_d(lam: RealFunction, gamma: float, w: Weight, tol: Optional[float] = None) -> WeightedTargetD:
    """Images ``[c, c']`` with ``int_[c,c'] lam psi = gamma * |J|_Psi``."""
    gamma = _check_lambda_and_gamma(lam, gamma, w.base)
    tol = 1e-13 * w.base.width() if tol is None else float(tol)
    return WeightedTargetD(eta=math.inf, lam=lam, gamma=gamma, weight=w, upsilon=w.times(lam), tol=tol)


def lipschitz_image(Lam: RealFunction, base: Interval) -> LipschitzImage:
    """Images ``[c, c + Lam(d) - Lam(c)]`` for nondecreasing, 1-Lipschitz ``Lam``."""
    x = np.linspace(base.lo, base.hi, CHECK_SAMPLES + 1)
    d = np.diff(Lam(x))
    dx = np.diff(x)
    bad = (d < 0) | (d > dx * (1 + 1e-12))
    if np.any(bad):
        k = int(np.argmax(bad))
        cond = "Λ nondecreasing" if d[k] < 0 else "Λ Lipschitz constant <= 1"
        raise HypothesisViolation(cond, (float(x[k]), float(x[k + 1])))
    return LipschitzImage(eta=math.inf, Lam=Lam, base=base)
