import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fn
from modriemann import (
    LEFT,
    MID,
    HypothesisViolation,
    Interval,
    InvalidArgument,
    Partition,
    RealFunction,
    Weight,
    common_refinement,
    lower_sum,
    oracle_integral,
    oscillation_sum,
    psi_length,
    refine_until,
    riemann_sum,
    seeded,
    uniform_partition,
    upper_sum,
)
from modriemann.stieltjes import cell_bounds, sum_report


# ---- psi_length


def test_psi_length_examples(unit, lebesgue):
    assert abs(psi_length(Weight.from_text("2*x", unit), Interval(0, 0.5)) - 0.25) <= 1e-12
    assert abs(psi_length(lebesgue, Interval(0.2, 0.7)) - 0.5) <= 1e-15
    # closed-form antiderivative of exp is exp
    assert abs(psi_length(Weight.from_text("exp(x)", unit), unit) - (math.e - 1)) <= 1e-9


def test_psi_length_closed_form_and_zero(unit):
    w = Weight.from_text("2*x", unit, Psi_text="x^2")
    assert psi_length(w, Interval(0.25, 0.5)) == 0.25 - 0.0625
    assert psi_length(w, Interval(0.3, 0.3)) == 0.0


def test_psi_length_outside_base(lebesgue):
    with pytest.raises(InvalidArgument):
        psi_length(lebesgue, Interval(0.5, 1.5))


def test_weight_rejects_nonpositive_density(unit):
    with pytest.raises(HypothesisViolation):
        Weight.from_text("x - 0.5", unit)


def test_table_matches_oracle_integral_of_density(unit):
    w = Weight.from_text("1 + x*sin(3*x)", unit)
    xs = np.linspace(0, 1, 11)
    for x in xs[1:]:
        ref = oracle_integral(fn("1 + x*sin(3*x)"), Weight.uniform(Interval(0, x)))
        assert abs((w.Psi(x) - w.Psi(0.0)) - ref.midpoint) <= 1e-9


# ---- Darboux sums, frozen against exact rational sums


def darboux_x2(n):
    up = sum(Fraction(k, n) ** 2 * Fraction(1, n) for k in range(1, n + 1))
    lo = sum(Fraction(k - 1, n) ** 2 * Fraction(1, n) for k in range(1, n + 1))
    return float(up), float(lo)


def test_upper_lower_examples(unit, lebesgue):
    p2 = uniform_partition(unit, 2)
    p4 = uniform_partition(unit, 4)
    assert upper_sum(fn("x"), lebesgue, p2) == 0.75
    assert lower_sum(fn("x"), lebesgue, p2) == 0.25
    up, lo = darboux_x2(4)
    assert (up, lo) == (0.46875, 0.21875)
    assert upper_sum(fn("x^2"), lebesgue, p4) == up
    assert lower_sum(fn("x^2"), lebesgue, p4) == lo
    assert oscillation_sum(fn("x"), lebesgue, p2) == 0.5
    assert oscillation_sum(fn("x^2"), lebesgue, p4) == 0.25


def test_constant_integrand(unit):
    w = Weight.from_text("1 + x^2", unit)
    p = Partition(unit, [0, 0.1, 0.45, 1])
    total = w.total()
    c = fn("2.5")
    assert abs(upper_sum(c, w, p) - 2.5 * total) <= 1e-15
    assert abs(lower_sum(c, w, p) - 2.5 * total) <= 1e-15
    assert oscillation_sum(c, w, p) == 0
    assert abs(riemann_sum(fn("1"), w, p, seeded(3)) - total) <= 1e-15


def test_riemann_examples(unit, lebesgue):
    assert riemann_sum(fn("x"), lebesgue, uniform_partition(unit, 2), MID) == 0.5
    w = Weight.from_text("2*x", unit)
    s = riemann_sum(fn("x"), w, uniform_partition(unit, 2**12), MID)
    assert abs(s - 2 / 3) <= 1e-4


def test_certified_bounds_contain_truth(unit):
    f = fn("sin(20*x)", lipschitz=20)
    p = uniform_partition(unit, 8)
    sup, inf, cert = cell_bounds(f, p.lo, p.hi)
    assert cert
    dense = np.linspace(0, 1, 200001)
    y = np.sin(20 * dense)
    for k in range(p.n):
        sel = (dense >= p.lo[k]) & (dense <= p.hi[k])
        assert sup[k] >= y[sel].max() and inf[k] <= y[sel].min()


# ---- refine_until


def test_refine_linear(unit, lebesgue):
    p, rep, ok = refine_until(fn("x"), lebesgue, 0.1)
    # U - L = 1/n for f(x) = x on [0, 1]
    assert ok and p.n == 16
    assert rep.upper - rep.lower == 1 / 16
    assert p.mesh <= unit.width() / p.n


def test_refine_constant(lebesgue):
    p, rep, ok = refine_until(fn("3"), lebesgue, 1e-9)
    assert ok and p.n == 2 and rep.upper == rep.lower


def test_refine_step(lebesgue):
    step = RealFunction(lambda x: np.where(x < 1 / 3, 0.0, 1.0), text="step")
    p, rep, ok = refine_until(step, lebesgue, 1e-6)
    # one straddling cell: U - L = jump * mesh
    assert ok
    assert rep.upper - rep.lower == pytest.approx(p.mesh, rel=1e-12)
    assert p.mesh <= 1e-6 < 2 * p.mesh


def test_refine_cap(lebesgue):
    p, rep, ok = refine_until(fn("x"), lebesgue, 1e-6, n_cap=64)
    assert not ok and p.n == 64


def test_refine_bad_eps(lebesgue):
    with pytest.raises(InvalidArgument):
        refine_until(fn("x"), lebesgue, 0.0)


# ---- oracle


def test_oracle_examples(unit, lebesgue):
    o = oracle_integral(fn("x^2"), lebesgue)
    assert abs(o.midpoint - 1 / 3) <= 1e-9
    assert o.lower <= 1 / 3 <= o.upper
    assert o.width <= 1 / 2**16
    one = oracle_integral(fn("1"), Weight.from_text("1+x", unit, Psi_text="x + x^2/2"))
    assert abs(one.midpoint - 1.5) <= 1e-13 and one.width <= 1e-13
    o = oracle_integral(fn("x"), Weight.from_text("2*x", unit))
    assert abs(o.midpoint - 2 / 3) <= 1e-9


# ---- properties


@st.composite
def problems(draw):
    a = draw(st.floats(-2, 2))
    b = a + draw(st.floats(0.25, 3))
    base = Interval(a, b)
    c = [draw(st.floats(-2, 2)) for _ in range(3)]
    k = draw(st.floats(0.5, 8))
    text = f"{abs(c[0])!r}*x - {abs(c[1])!r}*x^2 + {abs(c[2])!r}*sin({k!r}*x)"
    R = max(abs(a), abs(b))
    L = abs(c[0]) + 2 * abs(c[1]) * R + abs(c[2]) * k
    psi = draw(st.sampled_from(["1", "1 + x^2", "exp(x/2)", "2 + sin(x)"]))
    n = draw(st.integers(1, 200))
    return base, fn(text, lipschitz=L), Weight.from_text(psi, base), n


@settings(max_examples=60, deadline=None)
@given(problems(), st.sampled_from(["left", "right", "mid", "seeded:5"]))
def test_bracketing(prob, rule):
    from modriemann.core import SamplePointRule

    base, f, w, n = prob
    p = uniform_partition(base, n)
    r = sum_report(f, w, p, SamplePointRule.parse(rule))
    assert r.lower <= r.sample_sum <= r.upper
    s = riemann_sum(f, w, p, SamplePointRule.parse(rule))
    assert lower_sum(f, w, p) <= s <= upper_sum(f, w, p)


@settings(max_examples=40, deadline=None)
@given(problems())
def test_refinement_monotone(prob):
    base, f, w, n = prob
    p = uniform_partition(base, n)
    q = common_refinement(p, uniform_partition(base, 3 * n + 1))
    tol = 2 * f.lipschitz * p.mesh * w.total()
    assert upper_sum(f, w, q) <= upper_sum(f, w, p) + tol
    assert lower_sum(f, w, q) >= lower_sum(f, w, p) - tol


@settings(max_examples=40, deadline=None)
@given(problems())
def test_oscillation_sequential_bound(prob):
    base, f, w, n = prob
    L = f.lipschitz
    f = RealFunction(f.fn, text=f.text)  # uncertified: estimates never exceed the true oscillation
    for m in (n, 2 * n, 4 * n):
        p = uniform_partition(base, m)
        assert oscillation_sum(f, w, p) <= L * w.total() * p.mesh * (1 + 1e-9)


def test_riemann_inside_oracle_bracket(unit):
    w = Weight.from_text("1 + x", unit)
    f = fn("x*cos(3*x)", lipschitz=4)
    o = oracle_integral(f, w)
    s = riemann_sum(f, w, uniform_partition(unit, 2**12), MID)
    est_tol = f.lipschitz * w.total() / 2**12
    assert o.lower - est_tol <= s <= o.upper + est_tol
