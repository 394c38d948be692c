import ast
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import j1

from periabc.errors import ConfigurationError, PadInsufficientError, QuadratureError
from periabc.oracles import (
    ChebyshevPropagator,
    ModalChain,
    QuadratureSpec,
    analytic_bar,
    analytic_beam_kernel,
    bar_quadrature,
    chain_kernels,
    continuum_frequency,
    enlarged_reference,
    reference_pad,
)
from periabc.simulator import TimeGrid, bar_config, gaussian_initial, interface_config, seismic_config
from periabc.stencil import uniform_bonds


def test_analytic_bar_origin():
    assert analytic_bar(0.0, 0.0) == pytest.approx(1.0, abs=1e-10)


def test_analytic_bar_initial_profile():
    x = np.linspace(-10.0, 10.0, 81)
    assert np.abs(analytic_bar(x, 0.0) - np.exp(-(x**2))).max() <= 1e-10


@settings(max_examples=15, deadline=None)
@given(x=st.floats(0.0, 10.0), t=st.floats(0.0, 40.0))
def test_analytic_bar_is_even(x, t):
    assert analytic_bar(x, t) == pytest.approx(analytic_bar(-x, t), abs=1e-10)


def test_analytic_bar_quadrature_converges():
    x = np.linspace(0.0, 5.0, 11)
    t = 5.0
    ref = analytic_bar(x, t)
    for P in (16, 24, 32):
        coarse = np.abs(bar_quadrature(x, t, 0.25, 12.0, P, 1) - ref).max()
        fine = np.abs(bar_quadrature(x, t, 0.25, 12.0, 2 * P, 1) - ref).max()
        assert fine <= coarse / 4 or fine <= 1e-14


def test_analytic_bar_gives_up():
    spec = QuadratureSpec(panels=2, points_per_panel=1, max_panels=8, tolerance=1e-14)
    with pytest.raises(QuadratureError):
        analytic_bar(np.linspace(0, 10, 5), 30.0, spec=spec)
    with pytest.raises(ConfigurationError):
        QuadratureSpec(tolerance=0.0)


def test_continuum_long_wave_limit():
    # omega(k) -> k for small k, and saturates at 2/delta
    assert continuum_frequency(1e-4, 0.25) == pytest.approx(1e-4, rel=1e-6)
    assert continuum_frequency(1e3, 0.25) == pytest.approx(8.0, rel=1e-12)


def test_analytic_bar_against_fine_lattice():
    # the lattice with dx = 0.1 is within O(dx^2) of the continuum
    cfg = replace(bar_config(0.005), time=TimeGrid(0.005, 5.0, (5.0,)))
    u, _ = enlarged_reference(cfg)[5.0]
    x = cfg.x[::10]
    assert np.abs(u[::10] - analytic_bar(x, 5.0)).max() <= 0.1**2


def test_beam_kernel_zeros_and_start():
    assert analytic_beam_kernel(0.0) == 0.0
    assert analytic_beam_kernel(math.pi / 2) == pytest.approx(0.0, abs=1e-15)
    t = np.array([1e-8, 1e-7])
    assert np.allclose(analytic_beam_kernel(t), 4 * t, rtol=1e-12)


def test_beam_kernel_against_scipy():
    t = np.linspace(0.01, 60.0, 500)
    assert np.allclose(analytic_beam_kernel(t), 2 * j1(2 * t) * np.sin(2 * t) / t, rtol=1e-12, atol=1e-15)


def test_chain_kernel_is_bessel(beam):
    t = np.linspace(0.0, 10.0, 21)
    assert np.abs(chain_kernels(beam, t)[0, 0] - analytic_beam_kernel(t)).max() <= 1e-13


def test_modal_and_chebyshev_agree(bar, rng):
    n = 300
    bonds = uniform_bonds(bar, n)
    u0 = rng.normal(size=n)
    v0 = rng.normal(size=n)
    for t in (0.3, 4.0, 25.0):
        a = ModalChain(bonds.matrix()).propagate(u0, v0, t)
        b = ChebyshevPropagator(bonds).propagate(u0, v0, t)
        assert np.abs(a[0] - b[0]).max() <= 1e-9
        assert np.abs(a[1] - b[1]).max() <= 1e-8


def test_chebyshev_keeps_rigid_motion(bar):
    bonds = uniform_bonds(bar, 100)
    u, v = ChebyshevPropagator(bonds).propagate(np.ones(100), np.ones(100), 30.0)
    assert np.abs(u - 31.0).max() <= 1e-10
    assert np.abs(v - 1.0).max() <= 1e-12


def test_reference_at_zero_is_initial_data():
    cfg = bar_config(0.005)
    u, v = enlarged_reference(cfg, times=[0.0])[0.0]
    u0, v0 = gaussian_initial(cfg.x)
    assert np.abs(u - u0).max() <= 1e-14
    assert np.abs(v - v0).max() <= 1e-14


@pytest.mark.parametrize(
    "cfg",
    [bar_config(0.005), interface_config(0.5, 0.005), seismic_config(0.005)],
    ids=["bar", "interface", "seismic"],
)
def test_pad_doubling(cfg):
    enlarged_reference(cfg, self_check=True)


def test_short_pad_is_detected():
    cfg = bar_config(0.005)
    with pytest.raises(PadInsufficientError):
        enlarged_reference(cfg, times=[40.0], pad=20, self_check=True)


def test_pad_size():
    cfg = bar_config(0.005)
    assert reference_pad(cfg, 40.0) == math.ceil(1.1 * 9.998202766631357 * 40.0) + 7
    assert reference_pad(cfg, 0.0) == 7


def test_unknown_method():
    with pytest.raises(ConfigurationError):
        enlarged_reference(bar_config(0.005), method="finite-element")


def test_verlet_reference_is_second_order_close():
    diffs = []
    for dt in (0.01, 0.005):
        cfg = replace(bar_config(dt), time=TimeGrid(dt, 5.0, (5.0,)))
        modal = enlarged_reference(cfg)[5.0][0]
        verlet = enlarged_reference(cfg, method="verlet")[5.0][0]
        diffs.append(np.abs(modal - verlet).max())
    assert diffs[1] <= 1e-4
    assert math.log2(diffs[0] / diffs[1]) == pytest.approx(2.0, abs=0.1)


def test_reference_never_touches_boundary_kernels(monkeypatch):
    import periabc.boundary as boundary
    import periabc.kernel_f as kernel_f
    import periabc.oracles as oracles

    def trap(*args, **kwargs):
        raise AssertionError("reference reached the boundary-kernel machinery")

    monkeypatch.setattr(boundary.BoundaryHistory, "__init__", trap)
    monkeypatch.setattr(boundary.GhostEvaluator, "__init__", trap)
    monkeypatch.setattr(kernel_f, "solve_f", trap)
    for cfg in (bar_config(0.01), seismic_config(0.01)):
        cfg = replace(cfg, time=TimeGrid(0.01, 1.0, (1.0,)))
        enlarged_reference(cfg)
        enlarged_reference(cfg, method="verlet")
    tree = ast.parse(open(oracles.__file__).read())
    imported = {n.module for n in ast.walk(tree) if isinstance(n, ast.ImportFrom)}
    assert not imported & {"boundary", "kernel_f", "periabc.boundary", "periabc.kernel_f"}
