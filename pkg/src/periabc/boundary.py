"""Exact artificial boundary conditions by discrete convolution.

Ghost displacements at step ``j`` follow from the boundary-layer history:

    u_n^j = dt * sum_m sum_{alpha=1}^{j-1} f_n^{m,alpha} u_m^{j-alpha}
            + dt/2 * sum_m (f_n^{m,0} u_m^j + f_n^{m,j} u_m^0).

The right side reuses the left kernels through the mirror map
``n -> L+1-n``.
"""
from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, InvalidParameterError, SequencingError
from .kernel_f import KernelTable

SIDES = ("left", "right")


class BoundaryHistory:
    """Append-only history of the ``K`` boundary-layer displacements of one side.

    Layer slot ``m-1`` is node ``m`` on the left and node ``L-m+1`` on the
    right.  Storage is time-reversed so the convolution reads one contiguous
    slice per step.
    """

    def __init__(self, side: str, K: int, capacity: int, L: int | None = None):
        if side not in SIDES:
            raise InvalidParameterError(f"side must be 'left' or 'right', got {side!r}")
        self.side = side
        self.K = int(K)
        self.capacity = int(capacity)
        self.L = L
        self._buf = np.zeros((self.capacity + 1) * self.K)
        self.j_now = -1

    @property
    def layer(self) -> np.ndarray:
        """1-based node numbers of the tracked layer."""
        m = np.arange(1, self.K + 1)
        if self.side == "left":
            return m
        if self.L is None:
            raise ConfigurationError("right-side history needs the node count L")
        return self.L - m + 1

    def push(self, j: int, values) -> None:
        if j != self.j_now + 1:
            raise SequencingError(f"expected step {self.j_now + 1}, got {j}")
        if j > self.capacity:
            raise SequencingError(f"history capacity {self.capacity} exceeded")
        values = np.asarray(values, dtype=float)
        if values.shape != (self.K,):
            raise InvalidParameterError(f"layer values must have shape ({self.K},)")
        pos = (self.capacity - j) * self.K
        self._buf[pos : pos + self.K] = values
        self.j_now = j

    def column(self, j: int) -> np.ndarray:
        if not 0 <= j <= self.j_now:
            raise IndexError(f"step {j} not in history 0..{self.j_now}")
        pos = (self.capacity - j) * self.K
        return self._buf[pos : pos + self.K].copy()

    @property
    def u_hist(self) -> np.ndarray:
        """Layer history as ``[m-1, j]`` for ``j = 0..j_now``."""
        n = self.j_now + 1
        start = (self.capacity - self.j_now) * self.K
        rev = self._buf[start : start + n * self.K].reshape(n, self.K)
        return rev[::-1].T.copy()

    def _past(self, j: int) -> np.ndarray:
        """Flattened ``u^{j-1}, ..., u^{1}`` for the convolution."""
        return self._buf[(self.capacity - j + 1) * self.K : self.capacity * self.K]


class GhostEvaluator:
    """Kernel table laid out for the per-step convolution (``[p, (alpha, m)]``)."""

    def __init__(self, kt: KernelTable):
        self.kt = kt
        self.dt = kt.dt
        self.K = kt.K
        # rows p, columns (alpha, m) in time order
        self._rows = np.ascontiguousarray(kt.f.transpose(1, 2, 0)).reshape(self.K, -1)

    def __call__(self, h: BoundaryHistory) -> np.ndarray:
        j = h.j_now
        if j < 0:
            raise SequencingError("history is empty; push the initial layer first")
        if j > self.kt.steps:
            raise ConfigurationError(f"kernel table covers {self.kt.steps} steps, need {j}")
        K = self.K
        if j == 0:
            # trapezoid over a zero-length interval
            return np.zeros(K)
        f = self.kt.f
        u0 = h.column(0)
        uj = h.column(j)
        out = np.zeros(K)
        if j >= 2:
            out = self.dt * (self._rows[:, K : j * K] @ h._past(j))
        out = out + 0.5 * self.dt * (f[:, :, 0].T @ uj + f[:, :, j].T @ u0)
        return out


def ghost_values(kt: KernelTable, h: BoundaryHistory, dt: float | None = None) -> np.ndarray:
    """Ghost displacements ``u_{-p}`` (left) or ``u_{L+1+p}`` (right), ``p = 0..K-1``.

    For repeated calls build a :class:`GhostEvaluator` once instead.
    """
    if dt is not None and not np.isclose(dt, kt.dt, rtol=1e-12, atol=0.0):
        raise ConfigurationError(f"kernel dt={kt.dt} differs from simulation dt={dt}")
    if h.K != kt.K:
        raise ConfigurationError(f"history layer has K={h.K}, kernels have K={kt.K}")
    return GhostEvaluator(kt)(h)


def push_history(h: BoundaryHistory, j: int, values) -> BoundaryHistory:
    h.push(j, values)
    return h
