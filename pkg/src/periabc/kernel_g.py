"""Auxiliary lattice Green's functions ``g_m(t)``.

``g_m`` is the displacement of node ``m`` of the infinite chain after a unit
initial velocity at node 0.  Only ``0 <= m <= 2K-1`` are integrated; negative
indices come from evenness and ``2K <= m <= 3K-1`` from the recursive closure

    g_m = g_{m-2K} - sum_{k<K} k a_k/(K a_K) (g_{m-K+k} - g_{m-K-k})
          - 2 (m-K)/(K a_K) * gdot_{m-K}/t,

so the ODE system stays finite without any Fourier transform.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, StabilityError
from .stencil import StencilCoefficients, validate_symbol

RK4_STABILITY = 2.8
T_FLOOR_FACTOR = 1e-12


@dataclass(frozen=True)
class GreensTable:
    """Samples ``g[m, j] = g_m(j dt)`` and ``gdot[m, j]`` for ``0 <= m < 2K``."""

    dt: float
    g: np.ndarray
    gdot: np.ndarray
    stencil: StencilCoefficients

    @property
    def K(self) -> int:
        return self.stencil.K

    @property
    def steps(self) -> int:
        return self.g.shape[1] - 1

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.steps + 1)

    def value(self, m: int) -> np.ndarray:
        """History of ``g_m``; negative ``m`` map to ``|m|``."""
        m = abs(int(m))
        if m >= 2 * self.K:
            raise IndexError(f"g_{m} is outside the stored range 0..{2 * self.K - 1}")
        return self.g[m]


def singular_term(t: float, m: int, gdot: np.ndarray, K: int, t_floor: float) -> float:
    """``gdot_{m-K}(t) / t`` with the removable singularity at ``t = 0`` set to 0."""
    if abs(t) <= t_floor:
        return 0.0
    return gdot[m - K] / t


class _Closure:
    """Precomputed pieces of the right-hand side for one stencil."""

    def __init__(self, stencil: StencilCoefficients, t_floor: float):
        a = stencil.a
        K = stencil.K
        if a[K] == 0.0:
            raise InvalidParameterError("the recursion divides by a_K, which is zero")
        self.a = a
        self.K = K
        self.t_floor = t_floor
        self.c = np.arange(1, K) * a[1:K] / (K * a[K])
        self.s = 2.0 * np.arange(K, 2 * K) / (K * a[K])  # 2(m-K)/(K a_K), m = 2K..3K-1
        # ext[K + m] holds g_m for m = -K .. 3K-1
        self.ext = np.zeros(4 * K)

    def rhs(self, t: float, g: np.ndarray, gdot: np.ndarray) -> np.ndarray:
        K, a, ext = self.K, self.a, self.ext
        off = K
        ext[off : off + 2 * K] = g
        ext[off - K : off] = g[K:0:-1]
        kk = np.arange(1, K)
        for i, m in enumerate(range(2 * K, 3 * K)):
            val = ext[off + m - 2 * K]
            if K > 1:
                val -= self.c @ (ext[off + m - K + kk] - ext[off + m - K - kk])
            val -= self.s[i] * singular_term(t, m, gdot, K, self.t_floor)
            ext[off + m] = val
        acc = a[0] * g
        for k in range(1, K + 1):
            acc = acc + a[k] * (ext[off + k : off + k + 2 * K] + ext[off - k : off - k + 2 * K])
        return acc


def g_rhs(t: float, g: np.ndarray, gdot: np.ndarray, stencil: StencilCoefficients, dt: float = 1.0):
    """Second derivatives of ``g_0 .. g_{2K-1}`` at time ``t``."""
    g = np.asarray(g, dtype=float)
    gdot = np.asarray(gdot, dtype=float)
    if g.shape != (2 * stencil.K,) or gdot.shape != g.shape:
        raise InvalidParameterError(f"state arrays must have length 2K = {2 * stencil.K}")
    return _Closure(stencil, T_FLOOR_FACTOR * dt).rhs(t, g, gdot)


def recursion_values(t: float, g: np.ndarray, gdot: np.ndarray, stencil: StencilCoefficients, dt: float = 1.0):
    """``g_{2K} .. g_{3K-1}`` from the closure, for inspection and tests."""
    cl = _Closure(stencil, T_FLOOR_FACTOR * dt)
    cl.rhs(t, np.asarray(g, dtype=float), np.asarray(gdot, dtype=float))
    K = stencil.K
    return cl.ext[K + 2 * K : K + 3 * K].copy()


def rk4_march(stencil, g0, gdot0, t0: float, dt: float, steps: int):
    """Classical RK4 on ``(g, gdot)``; ``dt`` may be negative (time reversal)."""
    cl = _Closure(stencil, T_FLOOR_FACTOR * abs(dt))
    n = 2 * stencil.K
    G = np.empty((steps + 1, n))
    GD = np.empty((steps + 1, n))
    g = np.array(g0, dtype=float)
    v = np.array(gdot0, dtype=float)
    G[0], GD[0] = g, v
    h = dt
    for j in range(steps):
        t = t0 + j * h
        k1v = cl.rhs(t, g, v)
        k2x = v + 0.5 * h * k1v
        k2v = cl.rhs(t + 0.5 * h, g + 0.5 * h * v, k2x)
        k3x = v + 0.5 * h * k2v
        k3v = cl.rhs(t + 0.5 * h, g + 0.5 * h * k2x, k3x)
        k4x = v + h * k3v
        k4v = cl.rhs(t + h, g + h * k3x, k4x)
        g = g + (h / 6.0) * (v + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        G[j + 1], GD[j + 1] = g, v
    return G, GD


def integrate_g(stencil: StencilCoefficients, dt: float, T: float) -> GreensTable:
    """Integrate the closed system to time ``T`` with ``round(T/dt)`` RK4 steps."""
    if not dt > 0:
        raise InvalidParameterError(f"dt must be positive, got {dt!r}")
    if T < dt:
        raise InvalidParameterError(f"T={T} shorter than one step dt={dt}")
    omega_max = validate_symbol(stencil)
    if dt * omega_max > RK4_STABILITY:
        raise StabilityError(
            f"dt*omega_max = {dt * omega_max:.3f} exceeds {RK4_STABILITY} "
            f"(omega_max = {omega_max:.4f}); use dt <= {RK4_STABILITY / omega_max:.4g}"
        )
    J = int(round(T / dt))
    n = 2 * stencil.K
    g0 = np.zeros(n)
    v0 = np.zeros(n)
    v0[0] = 1.0
    G, GD = rk4_march(stencil, g0, v0, 0.0, dt, J)
    g = np.ascontiguousarray(G.T)
    gdot = np.ascontiguousarray(GD.T)
    g.setflags(write=False)
    gdot.setflags(write=False)
    return GreensTable(dt=float(dt), g=g, gdot=gdot, stencil=stencil)
