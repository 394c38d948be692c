"""Velocity Verlet for truncated peridynamic bars with exact or free ends."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import AbortedRunError, ConfigurationError, SequencingError, StabilityError
from .stencil import (
    BondStencil,
    MaterialLayout,
    StencilCoefficients,
    build_stencil,
    gaussian_micromodulus,
    heterogeneous_stencil,
    uniform_bonds,
    validate_symbol,
)

BOUNDARY_MODES = ("exact", "free")
INITIAL_MODES = ("gaussian", "zero")
VERLET_STABILITY = 2.0
BLOWUP_AMPLITUDE = 1e6


def ricker(t, f_p: float, t_D: float):
    """Ricker wavelet ``(1 - 2 pi^2 f_p^2 tau^2) exp(-pi^2 f_p^2 tau^2)``, ``tau = t - t_D``."""
    if not f_p > 0:
        raise ConfigurationError(f"peak frequency must be positive, got {f_p!r}")
    s = (math.pi * f_p * (np.asarray(t, dtype=float) - t_D)) ** 2
    out = (1.0 - 2.0 * s) * np.exp(-s)
    return float(out) if out.ndim == 0 else out


def ricker_rate(t, f_p: float, t_D: float):
    """Time derivative of :func:`ricker`."""
    c = (math.pi * f_p) ** 2
    tau = np.asarray(t, dtype=float) - t_D
    out = 2.0 * c * tau * (2.0 * c * tau**2 - 3.0) * np.exp(-c * tau**2)
    return float(out) if out.ndim == 0 else out


def gaussian_initial(x):
    """Initial data ``u = exp(-x^2)``, ``v = 0``."""
    x = np.asarray(x, dtype=float)
    u = np.exp(-(x**2))
    v = np.zeros_like(u)
    if u.ndim == 0:
        return float(u), 0.0
    return u, v


@dataclass(frozen=True)
class Domain:
    x_min: float = -10.0
    x_max: float = 10.0
    dx: float = 0.1


@dataclass(frozen=True)
class Horizon:
    delta: float = 0.25
    cutoff: float = 0.75


@dataclass(frozen=True)
class TimeGrid:
    dt: float = 0.005
    t_end: float = 40.0
    snapshots: tuple = ()


@dataclass(frozen=True)
class Interface:
    beta: float
    soft_interval: tuple = (-4.0, 4.0)


@dataclass(frozen=True)
class RickerSource:
    f_p: float = 0.2
    t_D: float = 5.0
    x: float = 0.0
    # the wavelet is symmetric about t_D and negligible outside [0, 2 t_D]
    release: float | None = None

    def __post_init__(self):
        if self.release is None:
            object.__setattr__(self, "release", 2.0 * self.t_D)


@dataclass(frozen=True)
class ScenarioConfig:
    domain: Domain = field(default_factory=Domain)
    horizon: Horizon = field(default_factory=Horizon)
    time: TimeGrid = field(default_factory=TimeGrid)
    initial: str = "gaussian"
    boundary: tuple = ("exact", "exact")
    interface: Interface | None = None
    source: RickerSource | None = None
    probes: tuple = ()

    def __post_init__(self):
        snaps = tuple(float(t) for t in self.time.snapshots)
        object.__setattr__(self, "time", replace(self.time, snapshots=snaps))
        object.__setattr__(self, "boundary", tuple(self.boundary))
        object.__setattr__(self, "probes", tuple(float(p) for p in self.probes))
        if self.initial not in INITIAL_MODES:
            raise ConfigurationError(f"initial must be one of {INITIAL_MODES}, got {self.initial!r}")
        if len(self.boundary) != 2 or any(b not in BOUNDARY_MODES for b in self.boundary):
            raise ConfigurationError(f"boundary must be two of {BOUNDARY_MODES}, got {self.boundary!r}")
        if any(t > self.time.t_end + 1e-12 or t < 0 for t in snaps):
            raise ConfigurationError("snapshot times must lie in [0, t_end]")
        d = self.domain
        if not (d.dx > 0 and d.x_max > d.x_min):
            raise ConfigurationError(f"bad domain {d!r}")
        if not (self.time.dt > 0 and self.time.t_end >= 0):
            raise ConfigurationError(f"bad time grid {self.time!r}")

    @property
    def L(self) -> int:
        d = self.domain
        return int(round((d.x_max - d.x_min) / d.dx)) + 1

    @property
    def x(self) -> np.ndarray:
        d = self.domain
        return d.x_min + d.dx * np.arange(self.L)

    @property
    def steps(self) -> int:
        return int(round(self.time.t_end / self.time.dt))

    @property
    def micromodulus(self):
        return gaussian_micromodulus(self.horizon.delta, self.horizon.cutoff)

    @property
    def stencil(self) -> StencilCoefficients:
        """Stencil of the hard (exterior) material."""
        return build_stencil(self.micromodulus, self.domain.dx)

    @property
    def layout(self) -> MaterialLayout | None:
        if self.interface is None:
            return None
        return MaterialLayout(tuple(self.interface.soft_interval), self.interface.beta)

    def node_index(self, x: float) -> int:
        """0-based index of the node nearest ``x``."""
        i = int(round((x - self.domain.x_min) / self.domain.dx))
        if not 0 <= i < self.L:
            raise ConfigurationError(f"x={x} is outside the domain")
        return i

    def step_of(self, t: float) -> int:
        j = int(round(t / self.time.dt))
        if abs(j * self.time.dt - t) > 1e-9 * max(1.0, t):
            raise ConfigurationError(f"time {t} is not on the grid dt={self.time.dt}")
        return j

    def to_dict(self) -> dict:
        out = asdict(self)
        out["boundary"] = {"left": self.boundary[0], "right": self.boundary[1]}
        out["time"]["snapshots"] = list(self.time.snapshots)
        out["probes"] = list(self.probes)
        if self.interface is not None:
            out["interface"]["soft_interval"] = list(self.interface.soft_interval)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        data = dict(data)
        boundary = data.get("boundary", {"left": "exact", "right": "exact"})
        if isinstance(boundary, dict):
            boundary = (boundary.get("left", "exact"), boundary.get("right", "exact"))
        time = dict(data.get("time", {}))
        time["snapshots"] = tuple(time.get("snapshots", ()))
        interface = data.get("interface")
        source = data.get("source")
        if source is not None:
            source = dict(source)
            kind = source.pop("type", "ricker")
            if kind != "ricker":
                raise ConfigurationError(f"unknown source type {kind!r}")
        return cls(
            domain=Domain(**data.get("domain", {})),
            horizon=Horizon(**data.get("horizon", {})),
            time=TimeGrid(**time),
            initial=data.get("initial", "gaussian"),
            boundary=tuple(boundary),
            interface=None if interface is None else Interface(
                beta=interface["beta"], soft_interval=tuple(interface.get("soft_interval", (-4.0, 4.0)))
            ),
            source=None if source is None else RickerSource(**source),
            probes=tuple(data.get("probes", ())),
        )


def bar_config(dt: float, t_end: float = 40.0, snapshots=(5.0, 10.0, 15.0, 40.0)) -> ScenarioConfig:
    return ScenarioConfig(time=TimeGrid(dt, t_end, tuple(snapshots)))


def interface_config(beta: float, dt: float, t_end: float = 100.0, snapshots=(10.0, 15.0, 40.0, 100.0)) -> ScenarioConfig:
    return ScenarioConfig(time=TimeGrid(dt, t_end, tuple(snapshots)), interface=Interface(beta))


def seismic_config(dt: float, t_end: float = 100.0, snapshots=(10.0, 15.0, 40.0, 100.0), release: float | None = None) -> ScenarioConfig:
    return ScenarioConfig(
        time=TimeGrid(dt, t_end, tuple(snapshots)),
        initial="zero",
        boundary=("exact", "free"),
        source=RickerSource(release=release),
        probes=(5.0,),
    )


def build_bonds(config: ScenarioConfig, x_nodes: np.ndarray) -> BondStencil:
    """Bond field on ``x_nodes`` (any node set on the scenario grid)."""
    if config.interface is None:
        return uniform_bonds(config.stencil, x_nodes.size)
    d = config.domain
    return heterogeneous_stencil(config.micromodulus, config.layout, d.dx, x_nodes, domain=(d.x_min, d.x_max))


def acceleration(u_ext: np.ndarray, bonds: BondStencil, interior: slice, ghosts_ready: bool = True) -> np.ndarray:
    """Accelerations of the interior nodes of ``u_ext`` (interior plus ghosts)."""
    if not ghosts_ready:
        raise SequencingError("ghost values for an exact side have not been set for this step")
    return bonds.apply(u_ext, rows=interior)


def bond_energy(u: np.ndarray, v: np.ndarray, bonds: BondStencil) -> float:
    """``sum v^2/2 + sum_bonds c (du)^2 / 2``, summed in a fixed order."""
    kinetic = 0.5 * float(np.dot(v, v))
    potential = 0.0
    n = u.size
    for k in range(1, bonds.K + 1):
        du = u[k:] - u[: n - k]
        potential += 0.5 * float(np.dot(bonds.right[: n - k, k - 1], du * du))
    return kinetic + potential


@dataclass
class SimulationState:
    u: np.ndarray
    v: np.ndarray
    acc: np.ndarray
    t: float
    j: int


@dataclass
class SimulationResult:
    config: ScenarioConfig
    x: np.ndarray
    snapshots: dict
    probes: np.ndarray
    probe_names: tuple
    histories: dict
    energy: np.ndarray | None = None

    def probe(self, name: str) -> np.ndarray:
        return self.probes[:, self.probe_names.index(name)]


class Simulation:
    """Truncated-domain run; ``exact`` sides are closed by convolution ghosts."""

    def __init__(self, config: ScenarioConfig, kernels=None, track_energy: bool = False):
        self.config = config
        d = config.domain
        self.dt = config.time.dt
        self.L = config.L
        stencil = config.stencil
        self.K = stencil.K
        omega_max = validate_symbol(stencil)
        if self.dt * omega_max > VERLET_STABILITY:
            raise StabilityError(f"dt*omega_max = {self.dt * omega_max:.3f} exceeds {VERLET_STABILITY}")
        left, right = config.boundary
        self.gl = self.K if left == "exact" else 0
        self.gr = self.K if right == "exact" else 0
        n_ext = self.gl + self.L + self.gr
        self.x_ext = d.x_min + d.dx * np.arange(-self.gl, self.L + self.gr)
        self.interior = slice(self.gl, self.gl + self.L)
        self.bonds = build_bonds(config, self.x_ext)
        self.J = config.steps

        self.histories = {}
        self._ghost = None
        if self.gl or self.gr:
            from .boundary import BoundaryHistory, GhostEvaluator

            if kernels is None:
                from .kernel_f import solve_f
                from .kernel_g import integrate_g

                kernels = solve_f(integrate_g(stencil, self.dt, max(config.time.t_end, self.dt)))
            if not np.isclose(kernels.dt, self.dt, rtol=1e-12, atol=0.0):
                raise ConfigurationError(f"kernel dt={kernels.dt} differs from simulation dt={self.dt}")
            if kernels.stencil != stencil:
                raise ConfigurationError("kernel table was built for a different stencil")
            if kernels.steps < self.J:
                raise ConfigurationError(f"kernel table covers {kernels.steps} steps, run needs {self.J}")
            self._ghost = GhostEvaluator(kernels)
            if self.gl:
                self.histories["left"] = BoundaryHistory("left", self.K, self.J, self.L)
            if self.gr:
                self.histories["right"] = BoundaryHistory("right", self.K, self.J, self.L)

        u = np.zeros(n_ext)
        v = np.zeros(self.L)
        if config.initial == "gaussian":
            u[self.interior], v[:] = gaussian_initial(config.x)
        self.src = None
        if config.source is not None:
            self.src = config.node_index(config.source.x)
            u[self.gl + self.src] = ricker(0.0, config.source.f_p, config.source.t_D)
            v[self.src] = ricker_rate(0.0, config.source.f_p, config.source.t_D)
        self.state = SimulationState(u=u, v=v, acc=np.zeros(self.L), t=0.0, j=0)
        self._record_layers(0)
        self._set_ghosts()
        self.state.acc = acceleration(u, self.bonds, self.interior)
        self.track_energy = track_energy

    def _layers(self):
        u = self.state.u[self.interior]
        return {"left": u[: self.K], "right": u[::-1][: self.K]}

    def _record_layers(self, j: int) -> None:
        if self.histories:
            layers = self._layers()
            for side, h in self.histories.items():
                h.push(j, layers[side])

    def _set_ghosts(self) -> None:
        u = self.state.u
        if "left" in self.histories:
            g = self._ghost(self.histories["left"])
            u[self.gl - 1 :: -1][: self.K] = g
        if "right" in self.histories:
            g = self._ghost(self.histories["right"])
            u[self.gl + self.L :] = g

    def _source_active(self, t: float) -> bool:
        return self.src is not None and t <= self.config.source.release + 1e-9 * self.dt

    def verlet_step(self) -> SimulationState:
        st = self.state
        dt = self.dt
        j1 = st.j + 1
        t1 = j1 * dt
        ui = st.u[self.interior]
        ui += st.v * dt + st.acc * (0.5 * dt * dt)
        src = self.config.source
        active = self._source_active(t1)
        if active:
            ui[self.src] = ricker(t1, src.f_p, src.t_D)
        self._record_layers(j1)
        self._set_ghosts()
        acc = acceleration(st.u, self.bonds, self.interior)
        st.v += (0.5 * dt) * (st.acc + acc)
        if active:
            st.v[self.src] = ricker_rate(t1, src.f_p, src.t_D)
        st.acc = acc
        st.t = t1
        st.j = j1
        return st

    def u(self) -> np.ndarray:
        return self.state.u[self.interior].copy()

    def energy(self) -> float:
        return bond_energy(self.state.u, np.concatenate([np.zeros(self.gl), self.state.v, np.zeros(self.gr)]), self.bonds)

    def run(self) -> SimulationResult:
        cfg = self.config
        snap_steps = {cfg.step_of(t): t for t in cfg.time.snapshots}
        names = ["u_origin", "u_left", "u_right"] + [f"u_x={p:g}" for p in cfg.probes]
        probe_idx = [cfg.node_index(0.0), 0, self.L - 1] + [cfg.node_index(p) for p in cfg.probes]
        probes = np.zeros((self.J + 1, 1 + len(probe_idx)))
        energy = np.zeros(self.J + 1) if self.track_energy else None
        snapshots = {}

        def record(j):
            ui = self.state.u[self.interior]
            probes[j, 0] = j * self.dt
            probes[j, 1:] = ui[probe_idx]
            if energy is not None:
                energy[j] = self.energy()
            if j in snap_steps:
                snapshots[snap_steps[j]] = (ui.copy(), self.state.v.copy())

        record(0)
        for j in range(1, self.J + 1):
            self.verlet_step()
            if j % 256 == 0 or j == self.J:
                amp = np.abs(self.state.u).max()
                if not np.isfinite(amp) or amp > BLOWUP_AMPLITUDE:
                    raise AbortedRunError(f"amplitude {amp:.3e} at t={j * self.dt:g}: unstable run")
            record(j)
        return SimulationResult(
            config=cfg,
            x=cfg.x,
            snapshots=snapshots,
            probes=probes,
            probe_names=("t", *names),
            histories=self.histories,
            energy=energy,
        )


def verlet_step(sim: Simulation) -> SimulationState:
    return sim.verlet_step()


def run_scenario(config: ScenarioConfig, kernels=None, track_energy: bool = False) -> SimulationResult:
    """Run ``config`` to ``t_end``; kernels are solved on demand if not given."""
    return Simulation(config, kernels=kernels, track_energy=track_energy).run()
