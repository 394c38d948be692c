"""Boundary kernels ``f_n^m(t)`` from the explicit trapezoidal Volterra march.

``f_n^m`` is the response of exterior node ``n`` (``-(K-1) <= n <= 0``) to an
impulse at boundary-layer node ``m`` (``1 <= m <= K``).  Writing ``p = -n``,

    f_p^{m,j} = -dt * sum_{l=0}^{K-1} sum_{k=l+1}^{K} a_k sum_{alpha=1}^{j} g_{k+p-l}^alpha f_l^{m,j-alpha}
                + sum_{k=0}^{K-m} a_{k+m} g_{k-p}^j,

where the end-point correction of the trapezoid vanishes because
``g(0) = 0`` and ``f(0) = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidParameterError, InvalidSourceError
from .kernel_g import GreensTable, rk4_march  # noqa: F401  (rk4_march re-exported for tools)
from .stencil import StencilCoefficients, validate_symbol


@dataclass(frozen=True)
class KernelTable:
    """``f[m-1, p, j] = f_{-p}^m(j dt)``.

    The exterior index is stored shifted: slot ``p`` holds node ``n = -p``.
    """

    dt: float
    f: np.ndarray
    stencil: StencilCoefficients

    @property
    def K(self) -> int:
        return self.stencil.K

    @property
    def steps(self) -> int:
        return self.f.shape[2] - 1

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.steps + 1)

    def kernel(self, m: int, n: int) -> np.ndarray:
        """History of ``f_n^m`` for ``1 <= m <= K`` and ``-(K-1) <= n <= 0``."""
        if not (1 <= m <= self.K and -(self.K - 1) <= n <= 0):
            raise IndexError(f"no kernel f_{n}^{m} for K={self.K}")
        return self.f[m - 1, -n]

    def truncated(self, steps: int) -> "KernelTable":
        if steps > self.steps:
            raise InvalidParameterError(f"table has only {self.steps} steps, asked for {steps}")
        return KernelTable(self.dt, self.f[:, :, : steps + 1], self.stencil)

    def time_major(self) -> np.ndarray:
        """``F[j, m-1, p]``, contiguous; the layout used by the boundary convolution."""
        return np.ascontiguousarray(self.f.transpose(2, 0, 1))


def _index_map(a: np.ndarray):
    """Contraction tensors for the memory term and the source term."""
    K = a.size - 1
    # memory: sum_l sum_k a_k g_{k+p-l} f_l  ->  T[q-1, l, p], q = k+p-l in 1..2K-1
    T = np.zeros((2 * K - 1, K, K))
    for l in range(K):
        for p in range(K):
            for k in range(l + 1, K + 1):
                T[k + p - l - 1, l, p] += a[k]
    # source: sum_{k=0}^{K-m} a_{k+m} g_{|k-p|}  ->  S[q, m-1, p], q in 0..K-1
    S = np.zeros((K, K, K))
    for m in range(1, K + 1):
        for p in range(K):
            for k in range(0, K - m + 1):
                S[abs(k - p), m - 1, p] += a[k + m]
    return T, S


def solve_f(gt: GreensTable) -> KernelTable:
    """March the Volterra system ``j = 1..J`` for all ``m`` at once."""
    a = gt.stencil.a
    K = gt.K
    J = gt.steps
    dt = gt.dt
    T, S = _index_map(a)
    # every g index the scheme touches must be stored
    assert np.max(np.nonzero(T.any(axis=(1, 2)))[0]) + 1 <= 2 * K - 1
    assert np.max(np.nonzero(S.any(axis=(1, 2)))[0]) <= 2 * K - 1

    gm = np.ascontiguousarray(gt.g[1 : 2 * K].T)  # gm[j, q-1] = g_q^j
    source = np.einsum("qj,qmp->jmp", gt.g[:K], S)  # source[j, m-1, p]
    # rev[J - i, m-1, l] = f_l^{m,i}: history reads become contiguous slices
    rev = np.zeros((J + 1, K * K))
    f = np.zeros((J + 1, K, K))
    T2 = T.reshape(2 * K - 1, K, K)
    for j in range(1, J + 1):
        # C[q-1, (m,l)] = sum_{alpha=1}^{j} g_q^alpha f_l^{m,j-alpha}
        C = gm[1 : j + 1].T @ rev[J - j + 1 : J + 1]
        conv = np.einsum("qml,qlp->mp", C.reshape(2 * K - 1, K, K), T2)
        fj = source[j] - dt * conv
        f[j] = fj
        rev[J - j] = fj.reshape(-1)
    out = np.ascontiguousarray(f.transpose(1, 2, 0))
    out.setflags(write=False)
    return KernelTable(dt=dt, f=out, stencil=gt.stencil)


def trapezoid_convolution(kernel: np.ndarray, signal: np.ndarray, dt: float) -> np.ndarray:
    """``(kernel * signal)(j dt)`` by the trapezoid rule, for all ``j``."""
    kernel = np.asarray(kernel, dtype=float)
    signal = np.asarray(signal, dtype=float)
    n = min(kernel.size, signal.size)
    full = np.convolve(kernel[:n], signal[:n])[:n]
    out = dt * (full - 0.5 * (kernel[0] * signal[:n] + kernel[:n] * signal[0]))
    return out


def _chain_response(stencil: StencilCoefficients, sources, dt: float, steps: int, n_nodes: int, substeps: int = 4):
    """Semi-infinite chain ``n <= 0`` driven by prescribed boundary nodes ``1..K``.

    Plain RK4 on a truncated chain whose far end is held at zero; the
    truncation is long enough that nothing reaches it.  Returns
    ``u[j, p]`` for nodes ``n = -p``, ``p < K``.
    """
    a = stencil.a
    K = stencil.K
    N = n_nodes
    # local index i <-> node n = i - (N-1);  i = N-1 is node 0
    def accel(u, t):
        ext = np.zeros(N + 2 * K)
        ext[K : K + N] = u
        for m, F in enumerate(sources, start=1):
            if F is not None:
                ext[K + N - 1 + m] = F(t)
        acc = a[0] * u
        for k in range(1, K + 1):
            acc = acc + a[k] * (ext[K + k : K + k + N] + ext[K - k : K - k + N])
        return acc

    h = dt / substeps
    u = np.zeros(N)
    v = np.zeros(N)
    out = np.zeros((steps + 1, K))
    t = 0.0
    for j in range(1, steps + 1):
        for _ in range(substeps):
            k1v = accel(u, t)
            k2v = accel(u + 0.5 * h * v, t + 0.5 * h)
            k3v = accel(u + 0.5 * h * (v + 0.5 * h * k1v), t + 0.5 * h)
            k4v = accel(u + h * (v + 0.5 * h * k2v), t + h)
            u, v = (
                u + h * v + (h * h / 6.0) * (k1v + k2v + k3v),
                v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
            )
            t += h
        out[j] = u[N - 1 : N - 1 - K : -1]
    return out


def kernel_convolution_check(
    kt: KernelTable,
    sources: Sequence[Callable[[float], float] | None],
    T: float,
    n_nodes: int | None = None,
) -> float:
    """Max discrepancy between ``sum_m f_n^m * F_m`` and a brute-force chain.

    ``sources[m-1]`` is ``F_m`` (``None`` means identically zero).  Each
    source must vanish at ``t = 0``.
    """
    K = kt.K
    if len(sources) != K:
        raise InvalidParameterError(f"need {K} source functions, got {len(sources)}")
    for m, F in enumerate(sources, start=1):
        if F is not None and abs(F(0.0)) > 1e-14:
            raise InvalidSourceError(f"F_{m}(0) = {F(0.0)!r}; sources must vanish at t = 0")
    steps = int(round(T / kt.dt))
    if steps > kt.steps:
        raise InvalidParameterError(f"kernel table covers {kt.steps} steps, need {steps}")
    if all(F is None for F in sources):
        return 0.0
    t = kt.t[: steps + 1]
    predicted = np.zeros((steps + 1, K))
    for m, F in enumerate(sources, start=1):
        if F is None:
            continue
        Fm = np.array([F(tt) for tt in t])
        for p in range(K):
            predicted[:, p] += trapezoid_convolution(kt.f[m - 1, p, : steps + 1], Fm, kt.dt)
    if n_nodes is None:
        n_nodes = 4 * int(np.ceil(validate_symbol(kt.stencil) * T)) + 200
    chain = _chain_response(kt.stencil, sources, kt.dt, steps, n_nodes)
    return float(np.abs(chain - predicted).max())
