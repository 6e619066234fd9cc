import math

import pytest
from hypothesis import given, strategies as st

from sizeroute import DomainError, ServiceMoments, UnstableStationError, pk_wait


def test_empty_system():
    assert pk_wait(0.0, ServiceMoments(3.0, 20.0)).mean_wait == 0.0


def test_mm1():
    # exponential service with mean 1: rho/(mu - lambda) = 1
    ev = pk_wait(0.5, ServiceMoments(1.0, 2.0))
    assert ev.mean_wait == pytest.approx(1.0, rel=1e-15)
    assert ev.load == 0.5


def test_md1():
    assert pk_wait(0.9, ServiceMoments(1.0, 1.0)).mean_wait == pytest.approx(4.5, rel=1e-14)


@pytest.mark.parametrize("rate", [1.0, 1.5])
def test_unstable_raises_with_load(rate):
    with pytest.raises(UnstableStationError) as info:
        pk_wait(rate, ServiceMoments(1.0, 1.0), "server 1")
    assert info.value.load == rate
    assert "server 1" in str(info.value)


def test_invalid_moments():
    with pytest.raises(DomainError):
        ServiceMoments(0.0, 1.0)
    with pytest.raises(DomainError):
        ServiceMoments(2.0, 3.0)
    with pytest.raises(DomainError):
        pk_wait(-1.0, ServiceMoments(1.0, 1.0))


@given(st.floats(0.0, 0.9), st.floats(0.001, 0.09), st.floats(1.0, 10.0))
def test_monotone_in_rate_and_m2(rate, step, spread):
    m = ServiceMoments(1.0, spread)
    assert pk_wait(rate + step, m).mean_wait > pk_wait(rate, m).mean_wait
    if rate > 0:
        assert pk_wait(rate, ServiceMoments(1.0, spread * 1.5)).mean_wait > pk_wait(rate, m).mean_wait


@given(st.floats(0.01, 0.99), st.floats(1.0, 100.0))
def test_doubling_m2_doubles_wait(rate, m2):
    w = pk_wait(rate, ServiceMoments(1.0, m2)).mean_wait
    assert pk_wait(rate, ServiceMoments(1.0, 2 * m2)).mean_wait == pytest.approx(2 * w, rel=1e-15)


@pytest.mark.parametrize("bound", [1e3, 1e6, 1e9])
def test_diverges_near_saturation(bound):
    # M/D/1 at load 1 - eps waits (1 - eps) / (2 eps)
    eps = 1.0 / (4 * bound)
    w = pk_wait(1.0 - eps, ServiceMoments(1.0, 1.0)).mean_wait
    assert w > bound and math.isfinite(w)
