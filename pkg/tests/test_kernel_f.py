import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from periabc.errors import InvalidParameterError, InvalidSourceError
from periabc.kernel_f import KernelTable, kernel_convolution_check, solve_f, trapezoid_convolution
from periabc.kernel_g import GreensTable, integrate_g
from periabc.oracles import analytic_beam_kernel, chain_kernels
from periabc.stencil import direct_stencil

PI = math.pi


def sin2(t):
    return math.sin(t) ** 2


@pytest.fixture(scope="module")
def beam_short(beam):
    return integrate_g(beam, 0.01, 6.0)


def test_first_column_is_zero(beam, bar):
    for s, dt in ((beam, 0.01), (bar, 0.005)):
        kt = solve_f(integrate_g(s, dt, 0.2))
        assert kt.f.shape == (s.K, s.K, kt.steps + 1)
        assert np.all(kt.f[:, :, 0] == 0.0)


def test_table_is_read_only(beam_short):
    kt = solve_f(beam_short)
    with pytest.raises(ValueError):
        kt.f[0, 0, 1] = 1.0


def test_kernel_accessor(beam_short):
    kt = solve_f(beam_short)
    assert np.array_equal(kt.kernel(2, -1), kt.f[1, 1])
    for m, n in ((0, 0), (3, 0), (1, 1), (1, -2)):
        with pytest.raises(IndexError):
            kt.kernel(m, n)


def test_zero_of_analytic_kernel(beam):
    dt = PI / 200
    kt = solve_f(integrate_g(beam, dt, 2.0))
    j = 100  # t = pi/2, where sin(2t) = 0
    assert analytic_beam_kernel(kt.t[j]) == pytest.approx(0.0, abs=1e-15)
    assert abs(kt.kernel(1, 0)[j]) <= dt**2


def test_matches_exact_half_chain(beam, beam_short):
    kt = solve_f(beam_short)
    idx = np.arange(0, kt.steps + 1, 25)
    exact = chain_kernels(beam, kt.t[idx])
    err = np.abs(kt.f[:, :, idx] - exact).max()
    # second order in dt at dt = 0.01
    assert err <= 5 * 0.01**2


def test_exact_half_chain_is_bessel(beam):
    t = np.linspace(0.0, 20.0, 41)
    assert np.abs(chain_kernels(beam, t)[0, 0] - analytic_beam_kernel(t)).max() <= 1e-13


def test_second_order_against_bessel(beam):
    errs = []
    for n in (250, 500):
        dt = 3 * PI / n
        kt = solve_f(integrate_g(beam, dt, 3 * PI))
        errs.append(abs(kt.kernel(1, 0)[-1] - analytic_beam_kernel(3 * PI)))
    assert math.log2(errs[0] / errs[1]) >= 2.0


@pytest.mark.xfail(strict=True, reason="early-time error is O(dt^2) at about 2e-4, far above 1e-6")
def test_window_agreement_to_18pi(beam):
    dt = 3 * PI / 500
    kt = solve_f(integrate_g(beam, dt, 18 * PI))
    assert np.abs(kt.kernel(1, 0) - analytic_beam_kernel(kt.t)).max() <= 1e-6


def test_endpoint_agreement_at_18pi(beam):
    dt = 3 * PI / 500
    kt = solve_f(integrate_g(beam, dt, 18 * PI))
    assert abs(kt.kernel(1, 0)[-1] - analytic_beam_kernel(18 * PI)) <= 1e-6


def test_causality(beam_short):
    full = solve_f(beam_short)
    j = 200
    cut = GreensTable(beam_short.dt, beam_short.g[:, : j + 1], beam_short.gdot[:, : j + 1], beam_short.stencil)
    assert np.array_equal(solve_f(cut).f, full.f[:, :, : j + 1])
    # later g columns cannot reach back
    g = beam_short.g.copy()
    g[:, j + 1 :] += 1.0
    bumped = solve_f(GreensTable(beam_short.dt, g, beam_short.gdot, beam_short.stencil))
    assert np.array_equal(bumped.f[:, :, : j + 1], full.f[:, :, : j + 1])
    assert not np.array_equal(bumped.f[:, :, j + 1], full.f[:, :, j + 1])


def test_truncated_table(beam_short):
    kt = solve_f(beam_short)
    assert kt.truncated(10).steps == 10
    with pytest.raises(InvalidParameterError):
        kt.truncated(kt.steps + 1)


@settings(max_examples=8, deadline=None)
@given(s=st.floats(0.5, 3.0))
def test_time_rescaling(beam, s):
    # a -> s^2 a runs the lattice s times faster; with dt -> dt/s the samples line up and f -> s f
    base = solve_f(integrate_g(beam, 0.02, 2.0))
    fast = solve_f(integrate_g(direct_stencil(beam.a * s * s), 0.02 / s, 2.0 / s))
    n = min(base.steps, fast.steps) + 1
    scale = np.abs(base.f).max()
    assert np.abs(fast.f[:, :, :n] - s * base.f[:, :, :n]).max() <= 1e-12 * s * scale


def test_trapezoid_convolution():
    dt = 0.01
    t = dt * np.arange(301)
    # (1 * t)(t) = t^2/2, exact for the trapezoid rule on a linear integrand
    conv = trapezoid_convolution(np.ones_like(t), t, dt)
    assert np.abs(conv - t**2 / 2).max() <= 1e-12
    assert conv[0] == 0.0


def test_convolution_check_zero_source(kernels, beam):
    kt = kernels(beam, 0.01, 5.0)
    assert kernel_convolution_check(kt, [None, None], 5.0) == 0.0
    assert kernel_convolution_check(kt, [lambda t: 0.0, None], 2.0) == 0.0


def test_convolution_check_rejects_bad_source(kernels, beam):
    kt = kernels(beam, 0.01, 5.0)
    with pytest.raises(InvalidSourceError):
        kernel_convolution_check(kt, [math.cos, None], 1.0)
    with pytest.raises(InvalidParameterError):
        kernel_convolution_check(kt, [sin2], 1.0)
    with pytest.raises(InvalidParameterError):
        kernel_convolution_check(kt, [sin2, None], 50.0)


@pytest.fixture(scope="module")
def convolution_discrepancy(beam):
    out = {}
    for dt in (1e-3, 2e-3):
        kt = solve_f(integrate_g(beam, dt, 20.0))
        out[dt] = kernel_convolution_check(kt, [sin2, None], 20.0)
    return out


def test_convolution_check_sin2(convolution_discrepancy):
    assert convolution_discrepancy[1e-3] <= 1e-4


def test_convolution_check_order(convolution_discrepancy):
    d = convolution_discrepancy
    assert math.log2(d[2e-3] / d[1e-3]) >= 1.99


def test_convolution_check_second_layer_source(kernels, beam):
    kt = kernels(beam, 0.01, 5.0)
    d = kernel_convolution_check(kt, [None, sin2], 5.0)
    assert d <= 5 * 0.01**2


def test_convolution_check_bar_order(kernels, bar):
    sources = [None] * bar.K
    sources[0] = sin2
    sources[3] = lambda t: t * t * math.exp(-t)
    d = [kernel_convolution_check(kernels(bar, dt, 2.0), sources, 2.0) for dt in (0.005, 0.0025)]
    assert d[0] <= 1e-4
    assert math.log2(d[0] / d[1]) >= 1.9


@pytest.mark.slow
@pytest.mark.skipif(not os.environ.get("PERIABC_LONG"), reason="O(J^2) march over 5e5 steps takes hours; set PERIABC_LONG=1")
def test_long_window_3000pi(beam):
    dt = 3 * PI / 500
    kt = solve_f(integrate_g(beam, dt, 3000 * PI))
    t = kt.t
    window = t >= 2990 * PI
    assert np.abs(kt.kernel(1, 0)[window] - analytic_beam_kernel(t[window])).max() <= 2e-8


def test_kernel_table_properties(beam_short):
    kt = solve_f(beam_short)
    assert isinstance(kt, KernelTable)
    assert kt.dt == beam_short.dt and kt.steps == beam_short.steps and kt.K == 2
    assert kt.time_major().shape == (kt.steps + 1, 2, 2)
