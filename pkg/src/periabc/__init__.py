"""Semi-discrete bond-based peridynamics in 1D with exact artificial boundary conditions.

The boundary treatment replaces the infinite exterior by convolutions of the
boundary-layer history with precomputed kernels ``f_n^m``.  These come from
lattice Green's functions ``g_m`` through a Volterra system, so the pipeline
is ``stencil -> kernel_g -> kernel_f -> boundary -> simulator``.
"""
from .boundary import BoundaryHistory, GhostEvaluator, ghost_values, push_history
from .errors import PeriABCError
from .kernel_f import KernelTable, kernel_convolution_check, solve_f
from .kernel_g import GreensTable, integrate_g
from .oracles import analytic_bar, analytic_beam_kernel, enlarged_reference
from .simulator import (
    ScenarioConfig,
    Simulation,
    bar_config,
    interface_config,
    run_scenario,
    seismic_config,
)
from .special import bessel_j1
from .stencil import (
    BondStencil,
    MaterialLayout,
    StencilCoefficients,
    bar_stencil,
    beam_stencil,
    build_stencil,
    direct_stencil,
    gaussian_micromodulus,
    heterogeneous_stencil,
)

__version__ = "0.1.0"

__all__ = [
    "BondStencil",
    "BoundaryHistory",
    "GhostEvaluator",
    "GreensTable",
    "KernelTable",
    "MaterialLayout",
    "PeriABCError",
    "ScenarioConfig",
    "Simulation",
    "StencilCoefficients",
    "analytic_bar",
    "analytic_beam_kernel",
    "bar_config",
    "bar_stencil",
    "beam_stencil",
    "bessel_j1",
    "build_stencil",
    "direct_stencil",
    "enlarged_reference",
    "gaussian_micromodulus",
    "ghost_values",
    "heterogeneous_stencil",
    "integrate_g",
    "interface_config",
    "kernel_convolution_check",
    "push_history",
    "run_scenario",
    "seismic_config",
    "solve_f",
]
