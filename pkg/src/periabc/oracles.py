"""Independent reference solutions.

None of these touch the boundary-kernel machinery: chains are solved by
eigendecomposition (exact in time) or by plain Verlet on a padded domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.chebyshev import chebinterpolate
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh

from .errors import ConfigurationError, PadInsufficientError, QuadratureError
from .special import bessel_j1
from .stencil import StencilCoefficients, max_group_speed, validate_symbol

PAD_SAFETY = 1.1
PAD_TOLERANCE = 1e-12
ZERO_MODE_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    k_max: float = 12.0
    panels: int | None = None
    tolerance: float = 1e-10
    points_per_panel: int = 4
    max_panels: int = 1 << 17

    def __post_init__(self):
        if not (self.k_max > 0 and self.tolerance > 0):
            raise ConfigurationError("k_max and tolerance must be positive")


def continuum_frequency(k, delta: float):
    """Dispersion relation of the continuous Gaussian-micromodulus bar."""
    k = np.asarray(k, dtype=float)
    return np.sqrt(-np.expm1(-(k**2) * delta**2 / 4.0) / (delta**2 / 4.0))


def bar_quadrature(x, t, delta, k_max, panels, npts):
    """One fixed composite Gauss-Legendre evaluation of the bar integral."""
    nodes, weights = leggauss(npts)
    edges = np.linspace(0.0, k_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    k = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    amp = w * np.exp(-(k**2) / 4.0) * np.cos(t * continuum_frequency(k, delta))
    return np.cos(np.multiply.outer(x, k)) @ amp / math.sqrt(math.pi)


def default_panels(x, t: float, spec: QuadratureSpec) -> int:
    # cos(kx) and cos(t omega(k)) oscillate with rates |x| and t*max(omega') <= t
    rate = float(np.max(np.abs(x))) + abs(t)
    periods = spec.k_max * rate / (2.0 * math.pi)
    return max(2000, int(math.ceil(20 * periods)))


def analytic_bar(x, t: float, delta: float = 0.25, spec: QuadratureSpec = QuadratureSpec()):
    """Continuum displacement for Gaussian initial data ``exp(-x^2)``.

    Composite Gauss-Legendre in the wavenumber; the panel count is doubled
    until two successive estimates agree to ``spec.tolerance``.
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    panels = spec.panels or default_panels(x_arr, t, spec)
    prev = bar_quadrature(x_arr, t, delta, spec.k_max, panels, spec.points_per_panel)
    while True:
        if 2 * panels > spec.max_panels:
            raise QuadratureError(f"tolerance {spec.tolerance} not reached with {spec.max_panels} panels")
        panels *= 2
        cur = bar_quadrature(x_arr, t, delta, spec.k_max, panels, spec.points_per_panel)
        if np.max(np.abs(cur - prev)) <= spec.tolerance:
            break
        prev = cur
    return float(cur[0]) if np.ndim(x) == 0 else cur


def analytic_beam_kernel(t):
    """``f_0^1(t) = 2 J_1(2t) sin(2t) / t`` for the Euler-Bernoulli beam stencil."""
    t = np.asarray(t, dtype=float)
    tt = np.atleast_1d(t)
    ratio = np.empty_like(tt)
    tiny = tt < 1e-6
    ratio[tiny] = 1.0 - 0.5 * tt[tiny] ** 2  # J1(2t)/t
    ratio[~tiny] = bessel_j1(2.0 * tt[~tiny]) / tt[~tiny]
    out = 2.0 * ratio * np.sin(2.0 * tt)
    return float(out[0]) if t.ndim == 0 else out


def _toeplitz_chain(a: np.ndarray, n: int) -> np.ndarray:
    K = a.size - 1
    M = np.diag(np.full(n, a[0]))
    for k in range(1, K + 1):
        M += np.diag(np.full(n - k, a[k]), k) + np.diag(np.full(n - k, a[k]), -k)
    return M


def _sinc_t(w, t):
    """``sin(w t)/w`` with the ``w -> 0`` limit."""
    wt = w * t
    small = np.abs(wt) < 1e-4
    safe = np.where(small, 1.0, w)
    return np.where(small, t * (1.0 - wt**2 / 6.0), np.sin(wt) / safe)


class ModalChain:
    """Exact-in-time solution of ``u'' = M u`` for symmetric ``M`` by eigendecomposition."""

    def __init__(self, M: np.ndarray):
        w2, V = eigh(-M)
        # rigid modes of free chains come back as +-1e-14 noise
        w2[w2 < ZERO_MODE_TOL * np.abs(w2).max()] = 0.0
        self.w = np.sqrt(w2)
        self.V = V

    def propagate(self, u0, v0, t, rows=slice(None)):
        cu = self.V.T @ u0
        cv = self.V.T @ v0
        c, s = np.cos(self.w * t), _sinc_t(self.w, t)
        Vr = self.V[rows]
        u = Vr @ (c * cu + s * cv)
        v = Vr @ (-self.w * np.sin(self.w * t) * cu + c * cv)
        return u, v


class ChebyshevPropagator:
    """Exact-in-time propagation through Chebyshev expansions in ``A = -M``.

    ``cos(t sqrt(A))``, ``sin(t sqrt(A))/sqrt(A)`` and ``sqrt(A) sin(t sqrt(A))``
    are entire in ``A``, so no square root of a computed eigenvalue enters and
    slow modes keep their phase over long times.  ``A`` is applied in bond
    difference form, which annihilates rigid motion exactly.
    """

    def __init__(self, bonds):
        self.bonds = bonds
        # Gershgorin bound on the spectrum of A
        self.lam = 2.0 * float(np.max(bonds.right.sum(axis=1) + bonds.left.sum(axis=1)))

    def degree(self, t: float) -> int:
        c = abs(t) * math.sqrt(self.lam)
        return int(math.ceil(0.5 * c + 10.0 * c ** (1.0 / 3.0) + 30))

    def coefficients(self, t: float):
        deg = self.degree(t)
        root = lambda x: np.sqrt(np.clip(0.5 * self.lam * (x + 1.0), 0.0, None))
        cc = chebinterpolate(lambda x: np.cos(t * root(x)), deg)
        cs = chebinterpolate(lambda x: t * np.sinc(t * root(x) / np.pi), deg)
        cd = chebinterpolate(lambda x: -root(x) * np.sin(t * root(x)), deg)
        return cc, cs, cd

    def propagate(self, u0, v0, t, rows=slice(None)):
        cc, cs, cd = self.coefficients(t)
        scale = -2.0 / self.lam

        def X(w):
            return scale * self.bonds.apply(w) - w

        prev = np.array([u0, v0], dtype=float)
        cur = np.array([X(prev[0]), X(prev[1])])
        u = cc[0] * prev[0] + cs[0] * prev[1] + cc[1] * cur[0] + cs[1] * cur[1]
        v = cd[0] * prev[0] + cc[0] * prev[1] + cd[1] * cur[0] + cc[1] * cur[1]
        for k in range(2, cc.size):
            nxt = np.array([2.0 * X(cur[0]) - prev[0], 2.0 * X(cur[1]) - prev[1]])
            u += cc[k] * nxt[0] + cs[k] * nxt[1]
            v += cd[k] * nxt[0] + cc[k] * nxt[1]
            prev, cur = cur, nxt
        return u[rows], v[rows]


def chain_nodes(stencil: StencilCoefficients, T: float, margin: int = 200) -> int:
    return int(math.ceil(PAD_SAFETY * max_group_speed(stencil) * T)) + margin + stencil.K


def chain_greens(stencil: StencilCoefficients, times, n_nodes: int | None = None, velocity: bool = False):
    """``g_m(t)`` for ``0 <= m <= 2K`` on a long symmetric chain; shape ``[m, it]``.

    With ``velocity=True`` also returns ``gdot`` in the same layout.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    N = n_nodes or chain_nodes(stencil, times.max()) + 2 * stencil.K
    chain = ModalChain(_toeplitz_chain(stencil.a, 2 * N + 1))
    v0 = np.zeros(2 * N + 1)
    v0[N] = 1.0
    rows = slice(N, N + 2 * stencil.K + 1)
    states = [chain.propagate(np.zeros_like(v0), v0, t, rows) for t in times]
    g = np.array([s[0] for s in states]).T
    if velocity:
        return g, np.array([s[1] for s in states]).T
    return g


def chain_kernels(stencil: StencilCoefficients, times, n_nodes: int | None = None) -> np.ndarray:
    """Exact ``f_{-p}^m(t)``; shape ``[m-1, p, it]``.

    The impulse at layer node ``m`` is equivalent to clamping nodes ``1..K``
    at zero and giving node ``n <= 0`` the initial velocity ``a_{m-n}``.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    a = stencil.a
    K = stencil.K
    N = n_nodes or chain_nodes(stencil, times.max())
    # local index i <-> node n = i - (N-1)
    chain = ModalChain(_toeplitz_chain(a, N))
    rows = np.arange(N - 1, N - 1 - K, -1)
    out = np.zeros((K, K, times.size))
    for m in range(1, K + 1):
        v0 = np.zeros(N)
        for n in range(m - K, 1):
            v0[n + N - 1] = a[m - n]
        for it, t in enumerate(times):
            out[m - 1, :, it] = chain.propagate(np.zeros(N), v0, t, rows)[0]
    return out


def reference_pad(config, T: float) -> int:
    """Exterior nodes per exact side so no signal returns within ``T``."""
    v = max_group_speed(config.stencil)
    return int(math.ceil(PAD_SAFETY * v * T)) + config.stencil.K


def _padded(config, pad: int):
    left, right = config.boundary
    pl = pad if left == "exact" else 0
    pr = pad if right == "exact" else 0
    d = config.domain
    x = d.x_min + d.dx * np.arange(-pl, config.L + pr)
    return pl, pr, x


def _modal_reference(config, times, pad):
    from .simulator import build_bonds, gaussian_initial, ricker, ricker_rate

    pl, pr, x = _padded(config, pad)
    L = config.L
    N = x.size
    rows = slice(pl, pl + L)
    bonds = build_bonds(config, x)
    M = bonds.matrix()
    u0 = np.zeros(N)
    v0 = np.zeros(N)
    if config.initial == "gaussian":
        u0[rows] = gaussian_initial(config.x)[0]
    out = {}
    src = config.source
    if src is None:
        chain = ChebyshevPropagator(bonds)
        for t in times:
            out[t] = chain.propagate(u0, v0, t, rows)
        return out

    s = pl + config.node_index(src.x)
    keep = np.delete(np.arange(N), s)
    reduced = ModalChain(M[np.ix_(keep, keep)])
    b = reduced.V.T @ M[keep, s]
    q0 = reduced.V.T @ u0[keep]
    qd0 = reduced.V.T @ v0[keep]
    w = reduced.w

    def forced_state(t):
        """Full padded state at ``t <= release`` with the source node prescribed."""
        panels = max(8, int(math.ceil(t * (w.max() + 4.0 * math.pi * src.f_p) / 2.0)))
        nodes, weights = leggauss(16)
        edges = np.linspace(0.0, t, panels + 1)
        half = 0.5 * np.diff(edges)
        tau = ((0.5 * (edges[1:] + edges[:-1]))[:, None] + half[:, None] * nodes).ravel()
        wts = (half[:, None] * weights).ravel() * ricker(tau, src.f_p, src.t_D)
        lag = t - tau
        Iu = _sinc_t(w[:, None], lag[None, :]) @ wts
        Iv = np.cos(np.multiply.outer(w, lag)) @ wts
        q = np.cos(w * t) * q0 + _sinc_t(w, t) * qd0 + b * Iu
        qd = -w * np.sin(w * t) * q0 + np.cos(w * t) * qd0 + b * Iv
        u = np.empty(N)
        v = np.empty(N)
        u[keep] = reduced.V @ q
        v[keep] = reduced.V @ qd
        u[s] = ricker(t, src.f_p, src.t_D)
        v[s] = ricker_rate(t, src.f_p, src.t_D)
        return u, v

    release = src.release
    late = [t for t in times if t > release]
    for t in times:
        if t <= release:
            u, v = forced_state(t)
            out[t] = (u[rows], v[rows])
    if late:
        ur, vr = forced_state(release) if release > 0 else (u0, v0)
        chain = ChebyshevPropagator(bonds)
        for t in late:
            out[t] = chain.propagate(ur, vr, t - release, rows)
    return out


def _verlet_reference(config, times, pad):
    from .simulator import Domain, Simulation, TimeGrid, acceleration

    pl, pr, x = _padded(config, pad)
    d = config.domain
    t_end = max(times) if times else 0.0
    big = replace(
        config,
        domain=Domain(x_min=d.x_min - pl * d.dx, x_max=d.x_max + pr * d.dx, dx=d.dx),
        boundary=("free", "free"),
        time=TimeGrid(config.time.dt, t_end, tuple(times)),
    )
    sim = Simulation(big)
    # exterior starts at rest and undisplaced
    ext = np.ones(x.size, dtype=bool)
    ext[pl : pl + config.L] = False
    if ext.any():
        sim.state.u[sim.interior][ext] = 0.0
        sim.state.acc = acceleration(sim.state.u, sim.bonds, sim.interior)
    res = sim.run()
    return {t: (u[pl : pl + config.L], v[pl : pl + config.L]) for t, (u, v) in res.snapshots.items()}


def enlarged_reference(config, times=None, method: str = "modal", pad: int | None = None, self_check: bool = False):
    """Reflection-free reference restricted to the original nodes.

    Exact sides are padded with ``reference_pad`` nodes of undisturbed hard
    material and free far ends; free sides stay as they are.  ``method`` is
    ``"modal"`` (exact in time) or ``"verlet"`` (same time stepping as the
    truncated run).  Returns ``{t: (u, v)}``.
    """
    if times is None:
        times = config.time.snapshots
    times = [float(t) for t in np.atleast_1d(times)]
    T = max(times) if times else 0.0
    pad = pad if pad is not None else reference_pad(config, T)
    solver = {"modal": _modal_reference, "verlet": _verlet_reference}.get(method)
    if solver is None:
        raise ConfigurationError(f"unknown reference method {method!r}")
    validate_symbol(config.stencil)
    out = solver(config, times, pad)
    if self_check:
        check = solver(config, times, 2 * pad)
        worst = max(
            max(np.abs(out[t][0] - check[t][0]).max(), np.abs(out[t][1] - check[t][1]).max()) for t in times
        )
        if worst > PAD_TOLERANCE:
            raise PadInsufficientError(f"doubling the pad changed the solution by {worst:.3e}")
    return out
