import pytest

from conftest import fn
from modriemann import InvalidArgument, RealFunction
from modriemann.signal import GatedSignalSpec, gated_integral, gated_integral_reference, retrieval_study

DYADIC = [2**k for k in range(4, 13)]


@pytest.mark.parametrize("n", [1, 3, 16, 1000])
def test_constant_half(lebesgue, n):
    assert gated_integral(GatedSignalSpec(RealFunction.constant(1.0), n, 0.5), lebesgue) == pytest.approx(0.5, abs=1e-14)


def test_ramp_left_and_reference(lebesgue):
    spec = GatedSignalSpec(fn("x"), 4, 0.5)
    assert gated_integral(spec, lebesgue) == 0.1875
    assert gated_integral_reference(spec, lebesgue) == pytest.approx(0.21875, abs=1e-15)


def test_sine_averages_out(lebesgue):
    spec = GatedSignalSpec(fn("sin(2*pi*x)"), 2**10, 0.5)
    assert abs(gated_integral(spec, lebesgue)) < 1e-2


def test_spec_validation():
    with pytest.raises(InvalidArgument):
        GatedSignalSpec(RealFunction.constant(1.0), 0, 0.5)
    with pytest.raises(InvalidArgument):
        GatedSignalSpec(RealFunction.constant(1.0), 4, 1.0)


def test_retrieval_cosine(lebesgue):
    rep = retrieval_study(fn("1 + 0.5*cos(2*pi*x)"), lebesgue, DYADIC, 0.5, workers=1)
    assert rep.predicted == pytest.approx(0.5, abs=1e-12)
    assert rep.converged


def test_retrieval_constant_exact(lebesgue):
    rep = retrieval_study(RealFunction.constant(1.0), lebesgue, DYADIC, 0.25, workers=1)
    assert all(s == pytest.approx(0.25, abs=1e-15) for s in rep.sums)


def test_retrieval_ramp(lebesgue):
    rep = retrieval_study(fn("x"), lebesgue, DYADIC, 0.5, workers=1)
    assert rep.predicted == pytest.approx(0.25, abs=1e-12)
    assert rep.converged
