"""D3Q19 lattice-Boltzmann solver for Stokes flow in binary pore geometries.

Single-relaxation-time (BGK) collision, halfway bounce-back at solid
voxels, and a constant body force along x standing in for the pressure
gradient.  Darcy permeability comes from the steady mean velocity:

    k_lattice = nu * U_mean / g,   nu = (tau - 1/2) / 3

with U_mean averaged over the entire domain (solid voxels contribute
zero).  Physical permeability is k_lattice * dx^2, reported in
millidarcy (1 mD = 9.869233e-16 m^2).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ConfigError, DivergenceError

MILLIDARCY_M2 = 9.869233e-16

# D3Q19: rest, 6 axis neighbors, 12 edge diagonals.  Opposite directions
# are adjacent pairs so OPP is trivial to read.
C = np.array(
    [
        (0, 0, 0),
        (1, 0, 0), (-1, 0, 0),
        (0, 1, 0), (0, -1, 0),
        (0, 0, 1), (0, 0, -1),
        (1, 1, 0), (-1, -1, 0),
        (1, -1, 0), (-1, 1, 0),
        (1, 0, 1), (-1, 0, -1),
        (1, 0, -1), (-1, 0, 1),
        (0, 1, 1), (0, -1, -1),
        (0, 1, -1), (0, -1, 1),
    ],
    dtype=np.int64,
)
W = np.array([1.0 / 3.0] + [1.0 / 18.0] * 6 + [1.0 / 36.0] * 12)
OPP = np.array([0, 2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11, 14, 13, 16, 15, 18, 17], dtype=np.int64)


@dataclass
class LbmConfig:
    """Solver parameters; lattice units unless noted."""

    relaxation_time: float = 1.0
    body_force: float = 1e-5
    convergence_tol: float = 1e-6
    check_interval: int = 100
    max_steps: int = 200000
    dynamic_viscosity: float = 1e-3  # Pa*s, physical (bookkeeping only)
    voxel_size: float = 0.003  # meters
    wall_axis: int | None = 2  # solid slabs on both faces normal to this axis

    def validate(self) -> None:
        if self.relaxation_time <= 0.5:
            raise ConfigError(f"relaxation_time must exceed 0.5, got {self.relaxation_time}")
        if self.body_force <= 0:
            raise ConfigError("body_force must be positive")
        if self.convergence_tol <= 0 or self.check_interval < 1 or self.max_steps < 0:
            raise ConfigError("tolerances and step limits must be positive")
        if self.wall_axis is not None and self.wall_axis not in (0, 1, 2):
            raise ConfigError(f"wall_axis must be None or 0/1/2, got {self.wall_axis}")
        if self.voxel_size <= 0:
            raise ConfigError("voxel_size must be positive")


@dataclass
class LbmState:
    """Distribution functions plus bookkeeping for one solve."""

    f: np.ndarray  # (19, n, n, n)
    solid: np.ndarray  # bool (n, n, n)
    step_count: int = 0
    last_mean_velocity: float = 0.0


@dataclass
class LbmResult:
    permeability_md: float
    k_lattice: float
    steps: int
    converged: bool
    mean_velocity: float  # over all voxels
    mean_velocity_pore: float  # over pore voxels only
    porosity: float
    history: list[tuple[int, float, float]] = field(default_factory=list)


def equilibrium(rho: float, u) -> np.ndarray:
    """Second-order BGK equilibrium for one node."""
    if rho <= 0:
        raise ValueError(f"density must be positive, got {rho}")
    u = np.asarray(u, dtype=float)
    cu = C @ u
    usq = float(u @ u)
    return W * rho * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * usq)


def kinematic_viscosity(tau: float) -> float:
    return (tau - 0.5) / 3.0


@njit(cache=True)
def _run_kernel(f, solid, g, tau, nsteps):  # pragma: no cover - jitted
    nx, ny, nz = solid.shape
    fnew = np.empty_like(f)
    for _ in range(nsteps):
        # collide (BGK) with simple x-forcing, fluid nodes only
        for x in range(nx):
            for y in range(ny):
                for z in range(nz):
                    if solid[x, y, z]:
                        continue
                    rho = 0.0
                    ux = 0.0
                    uy = 0.0
                    uz = 0.0
                    for i in range(19):
                        fi = f[i, x, y, z]
                        rho += fi
                        ux += fi * C[i, 0]
                        uy += fi * C[i, 1]
                        uz += fi * C[i, 2]
                    ux /= rho
                    uy /= rho
                    uz /= rho
                    usq = ux * ux + uy * uy + uz * uz
                    for i in range(19):
                        cu = C[i, 0] * ux + C[i, 1] * uy + C[i, 2] * uz
                        feq = W[i] * rho * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * usq)
                        f[i, x, y, z] += (feq - f[i, x, y, z]) / tau + 3.0 * W[i] * C[i, 0] * g
        # stream with periodic wrap; halfway bounce-back where the source
        # node is solid
        for x in range(nx):
            for y in range(ny):
                for z in range(nz):
                    if solid[x, y, z]:
                        for i in range(19):
                            fnew[i, x, y, z] = 0.0
                        continue
                    for i in range(19):
                        sx = (x - C[i, 0]) % nx
                        sy = (y - C[i, 1]) % ny
                        sz = (z - C[i, 2]) % nz
                        if solid[sx, sy, sz]:
                            fnew[i, x, y, z] = f[OPP[i], x, y, z]
                        else:
                            fnew[i, x, y, z] = f[i, sx, sy, sz]
        f, fnew = fnew, f
    return f


def solid_mask(voxels: np.ndarray, cfg: LbmConfig) -> np.ndarray:
    """Solid-node mask: grid solids plus the configured wall slabs."""
    solid = ~voxels.astype(bool)
    if cfg.wall_axis is not None:
        sl = [slice(None)] * 3
        sl[cfg.wall_axis] = 0
        solid[tuple(sl)] = True
        sl[cfg.wall_axis] = -1
        solid[tuple(sl)] = True
    return solid


def init_state(voxels: np.ndarray, cfg: LbmConfig) -> LbmState:
    """Equilibrium initialization (rho = 1, u = 0) on fluid nodes."""
    n = voxels.shape[0]
    if voxels.shape != (n, n, n):
        raise ValueError(f"voxel grid is not cubic: {voxels.shape}")
    solid = solid_mask(voxels, cfg)
    f = np.zeros((19, n, n, n))
    fluid = ~solid
    for i in range(19):
        f[i][fluid] = W[i]
    return LbmState(f=f, solid=solid)


def mean_x_velocity(state: LbmState) -> tuple[float, float]:
    """(mean over all voxels, mean over pore voxels) of the x velocity."""
    f = state.f
    mom = np.zeros(state.solid.shape)
    for i in range(19):
        if C[i, 0] == 1:
            mom += f[i]
        elif C[i, 0] == -1:
            mom -= f[i]
    rho = f.sum(axis=0)
    fluid = ~state.solid
    ux = np.zeros_like(mom)
    ux[fluid] = mom[fluid] / rho[fluid]
    nfluid = int(fluid.sum())
    total = float(ux.sum())
    return total / ux.size, (total / nfluid if nfluid else 0.0)


def step(state: LbmState, cfg: LbmConfig, nsteps: int = 1) -> LbmState:
    """Advance the state by ``nsteps`` collide-and-stream updates."""
    cfg.validate()
    f = _run_kernel(state.f, state.solid, cfg.body_force, cfg.relaxation_time, nsteps)
    if not np.all(np.isfinite(f)):
        raise DivergenceError(
            f"non-finite distribution detected at step {state.step_count + nsteps}"
        )
    new = LbmState(f=f, solid=state.solid, step_count=state.step_count + nsteps)
    new.last_mean_velocity, _ = mean_x_velocity(new)
    return new


def solve_permeability(voxels: np.ndarray, cfg: LbmConfig) -> LbmResult:
    """Run to steady state and extract Darcy permeability along x."""
    cfg.validate()
    state = init_state(voxels, cfg)
    nu = kinematic_viscosity(cfg.relaxation_time)
    dx2 = cfg.voxel_size**2
    fluid_count = int((~state.solid).sum())
    porosity = fluid_count / state.solid.size
    if fluid_count == 0:
        return LbmResult(0.0, 0.0, 0, True, 0.0, 0.0, porosity)

    history: list[tuple[int, float, float]] = []
    u_prev = 0.0
    converged = False
    while state.step_count < cfg.max_steps:
        todo = min(cfg.check_interval, cfg.max_steps - state.step_count)
        state = step(state, cfg, todo)
        u_all, u_pore = mean_x_velocity(state)
        if not np.isfinite(u_all):
            raise DivergenceError(f"mean velocity non-finite at step {state.step_count}")
        rel = abs(u_all - u_prev) / max(abs(u_all), 1e-300)
        history.append((state.step_count, u_all, rel))
        if rel < cfg.convergence_tol:
            converged = True
            break
        u_prev = u_all

    u_all, u_pore = mean_x_velocity(state)
    k_lattice = nu * u_all / cfg.body_force
    k_md = k_lattice * dx2 / MILLIDARCY_M2
    return LbmResult(
        permeability_md=k_md,
        k_lattice=k_lattice,
        steps=state.step_count,
        converged=converged,
        mean_velocity=u_all,
        mean_velocity_pore=u_pore,
        porosity=porosity,
        history=history,
    )
