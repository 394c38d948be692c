"""Coefficients of the semi-discrete bond-based peridynamic operator.

A homogeneous bar discretized with spacing ``dx`` obeys

    u_n'' = a_0 u_n + sum_{k=1}^{K} a_k (u_{n+k} + u_{n-k}),

with ``a_k = dx * C(k dx)`` and ``a_0 = -2 sum a_k``.  Heterogeneous bars
(a soft inclusion with ratio ``beta``) and free ends are represented by
:class:`BondStencil`, which stores every bond coefficient explicitly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateStencilError,
    InvalidParameterError,
    LayoutError,
    UnstableOperatorError,
)

SYMBOL_GRID_POINTS = 10_000

# K = floor(cutoff/dx) must include the boundary bond on exact ties.
_TIE_EPS = 1e-9


@dataclass(frozen=True)
class MicromodulusSpec:
    """Truncated Gaussian micromodulus ``amplitude * exp(-r^2/delta^2)``."""

    delta: float
    amplitude: float
    cutoff: float

    def __post_init__(self):
        for name in ("delta", "amplitude", "cutoff"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be positive, got {value!r}")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = self.amplitude * np.exp(-(r**2) / self.delta**2)
        out = np.where(np.abs(r) <= self.cutoff, out, 0.0)
        return out if out.ndim else float(out)


def gaussian_micromodulus(delta: float, cutoff: float) -> MicromodulusSpec:
    """Gaussian micromodulus with E = rho = 1, amplitude 4 / (delta^3 sqrt(pi))."""
    if not (delta > 0 and cutoff > 0):
        raise InvalidParameterError(
            f"delta and cutoff must be positive, got delta={delta!r}, cutoff={cutoff!r}"
        )
    return MicromodulusSpec(
        delta=float(delta),
        amplitude=4.0 / (delta**3 * math.sqrt(math.pi)),
        cutoff=float(cutoff),
    )


@dataclass(frozen=True)
class StencilCoefficients:
    """Homogeneous stencil ``a_0 .. a_K``."""

    a: np.ndarray = field(repr=True)

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        if a.ndim != 1 or a.size < 2:
            raise InvalidParameterError("a stencil needs at least a_0 and a_1")
        if not np.all(np.isfinite(a)):
            raise InvalidParameterError("stencil coefficients must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @property
    def K(self) -> int:
        return self.a.size - 1

    @property
    def row_sum(self) -> float:
        return float(self.a[0] + 2.0 * self.a[1:].sum())

    @property
    def zero_row_sum(self) -> bool:
        scale = max(abs(self.a[0]), np.abs(self.a[1:]).max(), 1e-300)
        return abs(self.row_sum) <= 1e-12 * scale

    @property
    def is_zero(self) -> bool:
        return not np.any(self.a)

    def symbol(self, x):
        """Dispersion symbol ``a_0 + 2 sum a_k cos(k x)`` (equals ``-omega(x)^2``)."""
        x = np.asarray(x, dtype=float)
        k = np.arange(1, self.K + 1)
        return self.a[0] + 2.0 * np.cos(np.multiply.outer(x, k)) @ self.a[1:]

    def omega(self, x):
        return np.sqrt(np.clip(-self.symbol(x), 0.0, None))

    def to_dict(self) -> dict:
        return {"K": self.K, "a": [float(v) for v in self.a]}

    @classmethod
    def from_dict(cls, data: dict) -> "StencilCoefficients":
        s = cls(data["a"])
        if "K" in data and int(data["K"]) != s.K:
            raise InvalidParameterError(f"K={data['K']} inconsistent with {s.K + 1} coefficients")
        return s

    def __eq__(self, other):
        if not isinstance(other, StencilCoefficients):
            return NotImplemented
        return np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash(self.a.tobytes())


def nonlocal_degree(cutoff: float, dx: float) -> int:
    return int(math.floor(cutoff / dx + _TIE_EPS))


def build_stencil(spec: MicromodulusSpec, dx: float) -> StencilCoefficients:
    """Stencil of a homogeneous bar with grid spacing ``dx``.

    ``a_0`` is built from the bonds, not from ``C(0)``, so constant fields
    have exactly zero acceleration.
    """
    if not dx > 0:
        raise InvalidParameterError(f"dx must be positive, got {dx!r}")
    K = nonlocal_degree(spec.cutoff, dx)
    if K < 1:
        raise DegenerateStencilError(f"dx={dx} exceeds the cutoff {spec.cutoff}: no bonds")
    k = np.arange(1, K + 1)
    # evaluate the Gaussian directly: k*dx may exceed cutoff by rounding on ties
    ak = dx * spec.amplitude * np.exp(-((k * dx) ** 2) / spec.delta**2)
    a = np.empty(K + 1)
    a[1:] = ak
    a[0] = -2.0 * ak.sum()
    return StencilCoefficients(a)


def direct_stencil(a) -> StencilCoefficients:
    """Wrap user coefficients, e.g. ``[-6, 4, -1]`` for the Euler-Bernoulli beam."""
    a = list(a)
    if len(a) < 2:
        raise InvalidParameterError("need at least two coefficients [a_0, a_1, ...]")
    return StencilCoefficients(a)


BEAM_COEFFICIENTS = (-6.0, 4.0, -1.0)


def beam_stencil() -> StencilCoefficients:
    """Fourth-difference stencil of the discrete Euler-Bernoulli beam (``K = 2``)."""
    return direct_stencil(BEAM_COEFFICIENTS)


def bar_stencil(delta: float = 0.25, cutoff: float = 0.75, dx: float = 0.1) -> StencilCoefficients:
    """Gaussian-micromodulus bar on the default grid (``K = 7``)."""
    return build_stencil(gaussian_micromodulus(delta, cutoff), dx)


def symbol_grid(n: int = SYMBOL_GRID_POINTS) -> np.ndarray:
    return np.linspace(0.0, math.pi, n)


def validate_symbol(s: StencilCoefficients) -> float:
    """Return the maximal lattice frequency; raise if the symbol is positive anywhere."""
    sym = s.symbol(symbol_grid())
    scale = max(np.abs(s.a).sum(), 1e-300)
    if sym.max() > 1e-12 * scale:
        x_bad = symbol_grid()[int(np.argmax(sym))]
        raise UnstableOperatorError(
            f"symbol reaches {sym.max():.3e} > 0 at x={x_bad:.4f}: complex frequencies"
        )
    return float(np.sqrt(max(-sym.min(), 0.0)))


def max_group_speed(s: StencilCoefficients) -> float:
    """Largest |d omega / dx| in nodes per unit time, by finite differences."""
    x = symbol_grid()
    w = s.omega(x)
    return float(np.abs(np.diff(w) / np.diff(x)).max())


@dataclass(frozen=True)
class MaterialLayout:
    """Soft inclusion ``[lo, hi]`` whose bonds are scaled by ``beta``."""

    soft_interval: tuple
    beta: float

    def __post_init__(self):
        lo, hi = (float(v) for v in self.soft_interval)
        if not lo < hi:
            raise LayoutError(f"empty soft interval {self.soft_interval!r}")
        if not (0.0 < self.beta <= 1.0):
            raise LayoutError(f"beta must lie in (0, 1], got {self.beta!r}")
        object.__setattr__(self, "soft_interval", (lo, hi))

    def is_soft(self, x, dx: float):
        lo, hi = self.soft_interval
        tol = 1e-9 * dx
        x = np.asarray(x, dtype=float)
        return (x >= lo - tol) & (x <= hi + tol)

    def validate(self, x_min: float, x_max: float, K: int, dx: float) -> None:
        lo, hi = self.soft_interval
        margin = K * dx - 1e-9 * dx
        if lo - x_min < margin or x_max - hi < margin:
            raise LayoutError(
                f"soft interval {self.soft_interval} needs at least {K}*dx of hard "
                f"material inside [{x_min}, {x_max}]"
            )


@dataclass(frozen=True)
class BondStencil:
    """Per-node bond coefficients on a finite node set.

    ``right[i, k-1]`` couples node ``i`` to ``i+k`` and ``left[i, k-1]`` couples
    node ``i`` to ``i-k``; bonds reaching outside the node set are zero.
    """

    right: np.ndarray
    left: np.ndarray

    def __post_init__(self):
        for name in ("right", "left"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.right.shape != self.left.shape:
            raise InvalidParameterError("left/right bond arrays differ in shape")

    @property
    def n_nodes(self) -> int:
        return self.right.shape[0]

    @property
    def K(self) -> int:
        return self.right.shape[1]

    @property
    def a0(self) -> np.ndarray:
        return -(self.right.sum(axis=1) + self.left.sum(axis=1))

    def matrix(self) -> np.ndarray:
        """Dense operator matrix (off-diagonals from ``right``/``left``)."""
        n = self.n_nodes
        M = np.diag(self.a0)
        for k in range(1, self.K + 1):
            idx = np.arange(n - k)
            M[idx, idx + k] = self.right[: n - k, k - 1]
            M[idx + k, idx] = self.left[k:, k - 1]
        return M

    def bond_matrix(self) -> np.ndarray:
        """Off-diagonal part only; symmetric for a valid bond field."""
        M = self.matrix()
        np.fill_diagonal(M, 0.0)
        return M

    def apply(self, u: np.ndarray, rows: slice = slice(None)) -> np.ndarray:
        """Acceleration ``sum_k c (u_{i+-k} - u_i)`` at ``rows``."""
        u = np.asarray(u, dtype=float)
        n = u.size
        start, stop, _ = rows.indices(n)
        acc = np.zeros(stop - start)
        for k in range(1, self.K + 1):
            lo = max(start, 0)
            # right neighbours
            hi = min(stop, n - k)
            if hi > lo:
                acc[lo - start : hi - start] += self.right[lo:hi, k - 1] * (
                    u[lo + k : hi + k] - u[lo:hi]
                )
            lo = max(start, k)
            if stop > lo:
                acc[lo - start : stop - start] += self.left[lo:stop, k - 1] * (
                    u[lo - k : stop - k] - u[lo:stop]
                )
        return acc


def uniform_bonds(s: StencilCoefficients, n_nodes: int) -> BondStencil:
    right = np.zeros((n_nodes, s.K))
    left = np.zeros((n_nodes, s.K))
    for k in range(1, s.K + 1):
        right[: n_nodes - k, k - 1] = s.a[k]
        left[k:, k - 1] = s.a[k]
    return BondStencil(right, left)


def heterogeneous_stencil(
    spec: MicromodulusSpec,
    layout: MaterialLayout,
    dx: float,
    x: np.ndarray,
    domain: tuple | None = None,
) -> BondStencil:
    """Bond field of a composite bar on the nodes ``x`` (uniform spacing ``dx``).

    A bond keeps its full coefficient ``dx C(k dx)`` only when both ends are
    hard; otherwise it is scaled by ``beta``.  ``domain`` (defaults to the
    extent of ``x``) is used to check the hard margin around the inclusion.
    """
    base = build_stencil(spec, dx)
    x = np.asarray(x, dtype=float)
    if domain is None:
        domain = (x[0], x[-1])
    layout.validate(domain[0], domain[1], base.K, dx)
    n = x.size
    soft = layout.is_soft(x, dx)
    beta = float(layout.beta)
    right = np.zeros((n, base.K))
    left = np.zeros((n, base.K))
    for k in range(1, base.K + 1):
        ak = base.a[k]
        i = np.arange(n - k)
        scale = np.where(soft[i] | soft[i + k], beta, 1.0)
        right[i, k - 1] = scale * ak
        j = np.arange(k, n)
        scale = np.where(soft[j] | soft[j - k], beta, 1.0)
        left[j, k - 1] = scale * ak
    return BondStencil(right, left)
