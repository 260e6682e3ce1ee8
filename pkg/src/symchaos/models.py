"""Lorenz and Rossler vector fields, equilibria, and ODE integration.

Integrators are deliberately written as plain-Python inner loops over
scalar floats: for these 3D systems that is several times faster than
per-step numpy dispatch, and parameter sweeps live or die on step cost.
Two methods are provided: a fixed-step classical 4th-order Runge-Kutta
and an embedded adaptive 3(2) pair (Bogacki-Shampine) whose dense output
is interpolated onto a uniform output grid, so downstream event
detection always sees equally spaced samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

# A state component beyond this magnitude is treated as a blow-up.
DIVERGENCE_LIMIT = 1.0e6


class State3(NamedTuple):
    """Point in the 3D phase space."""

    x: float
    y: float
    z: float


class BlowUpError(RuntimeError):
    """Integration diverged (non-finite or |component| > DIVERGENCE_LIMIT)."""

    def __init__(self, time: float, message: str = ""):
        self.time = time
        super().__init__(message or f"integration diverged at t={time:.6g}")


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    r: float = 28.0
    b: float = 8.0 / 3.0

    def __post_init__(self):
        if self.sigma <= 0 or self.r <= 0 or self.b <= 0:
            raise ValueError("Lorenz parameters must be positive")


@dataclass(frozen=True)
class RosslerParams:
    a: float = 0.341
    b: float = 0.3
    c: float = 4.8

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0 or self.c <= 0:
            raise ValueError("Rossler parameters must be positive")


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration settings.

    ``dt`` is the *output* sample spacing. For the fixed-step method it is
    also the internal step; the adaptive method chooses its own internal
    steps and fills the grid by dense output. ``noise_std`` adds i.i.d.
    Gaussian noise to every stored component after integration; the
    underlying dynamics stay noise-free.
    """

    t_total: float
    dt: float = 0.01
    method: str = "rk4"  # "rk4" (fixed step) or "bs23" (embedded adaptive)
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    t_transient: float = 0.0
    noise_std: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_transient < 0:
            raise ValueError("t_transient must be non-negative")
        if self.t_total <= self.t_transient:
            raise ValueError("t_total must exceed t_transient")
        if self.method not in ("rk4", "bs23"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "bs23" and (self.abs_tol <= 0 or self.rel_tol <= 0):
            raise ValueError("tolerances must be positive")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")


@dataclass
class Trajectory:
    """Uniformly sampled orbit. ``samples[k]`` is the state at t0 + k*dt."""

    dt: float
    samples: np.ndarray  # shape (n, 2+), one state per row
    params: object
    seed: int
    t0: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2 or len(self.samples) < 2:
            raise ValueError("trajectory needs at least two samples")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("trajectory samples must be finite")

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.samples))

    def channel(self, name: str) -> np.ndarray:
        return self.samples[:, "xyz".index(name)]


def lorenz_rhs(s, p: LorenzParams) -> State3:
    """Classical Lorenz right-hand side."""
    x, y, z = s
    return State3(p.sigma * (y - x), x * (p.r - z) - y, x * y - p.b * z)


def rossler_rhs(s, p: RosslerParams) -> State3:
    x, y, z = s
    return State3(-y - z, x + p.a * y, p.b * x + z * (x - p.c))


def rossler_equilibria(p: RosslerParams) -> tuple[State3, State3]:
    """The origin and the second equilibrium (c-ab, b-c/a, -(b-c/a))."""
    if p.a == 0:
        raise ValueError("degenerate parameter: a must be nonzero")
    w = p.b - p.c / p.a
    return State3(0.0, 0.0, 0.0), State3(p.c - p.a * p.b, w, -w)


def _rhs_closure(model: str, params) -> Callable:
    """Scalar-argument RHS closure used by the integration inner loops."""
    if model == "lorenz":
        sigma, r, b = params.sigma, params.r, params.b

        def f(x, y, z):
            return sigma * (y - x), x * (r - z) - y, x * y - b * z

    elif model == "rossler":
        a, b, c = params.a, params.b, params.c

        def f(x, y, z):
            return -y - z, x + a * y, b * x + z * (x - c)

    else:
        raise ValueError(f"unknown model {model!r}")
    return f


def rk4_step(f, x, y, z, h):
    """One classical RK4 step of the scalar-closure RHS."""
    ax, ay, az = f(x, y, z)
    h2 = 0.5 * h
    bx, by, bz = f(x + h2 * ax, y + h2 * ay, z + h2 * az)
    cx, cy, cz = f(x + h2 * bx, y + h2 * by, z + h2 * bz)
    dx, dy, dz = f(x + h * cx, y + h * cy, z + h * cz)
    s = h / 6.0
    return (x + s * (ax + 2.0 * (bx + cx) + dx),
            y + s * (ay + 2.0 * (by + cy) + dy),
            z + s * (az + 2.0 * (bz + cz) + dz))


def _integrate_rk4(f, s0, dt, n_total, n_skip):
    lim = DIVERGENCE_LIMIT
    x, y, z = float(s0[0]), float(s0[1]), float(s0[2])
    out = np.empty((n_total - n_skip, 3))
    if n_skip == 0:
        out[0, 0], out[0, 1], out[0, 2] = x, y, z
    for k in range(1, n_total):
        x, y, z = rk4_step(f, x, y, z, dt)
        if not (-lim < x < lim and -lim < y < lim and -lim < z < lim):
            raise BlowUpError(k * dt)
        if k >= n_skip:
            j = k - n_skip
            out[j, 0], out[j, 1], out[j, 2] = x, y, z
    return out


def _integrate_bs23(f, s0, dt, n_total, n_skip, abs_tol, rel_tol):
    """Adaptive Bogacki-Shampine 3(2) with cubic-Hermite dense output."""
    lim = DIVERGENCE_LIMIT
    x, y, z = float(s0[0]), float(s0[1]), float(s0[2])
    out = np.empty((n_total - n_skip, 3))
    j = 0
    if n_skip == 0:
        out[0, 0], out[0, 1], out[0, 2] = x, y, z
        j = 1
    next_k = max(n_skip, 1)

    t = 0.0
    t_end = (n_total - 1) * dt
    h = dt
    k1x, k1y, k1z = f(x, y, z)
    while t < t_end - 1e-12 * t_end:
        h = min(h, t_end - t)
        # stage values
        h2 = 0.5 * h
        k2x, k2y, k2z = f(x + h2 * k1x, y + h2 * k1y, z + h2 * k1z)
        h75 = 0.75 * h
        k3x, k3y, k3z = f(x + h75 * k2x, y + h75 * k2y, z + h75 * k2z)
        nx = x + h * (2.0 / 9.0 * k1x + 1.0 / 3.0 * k2x + 4.0 / 9.0 * k3x)
        ny = y + h * (2.0 / 9.0 * k1y + 1.0 / 3.0 * k2y + 4.0 / 9.0 * k3y)
        nz = z + h * (2.0 / 9.0 * k1z + 1.0 / 3.0 * k2z + 4.0 / 9.0 * k3z)
        k4x, k4y, k4z = f(nx, ny, nz)
        # embedded 2nd-order error estimate
        ex = h * (k1x * (2.0 / 9.0 - 7.0 / 24.0) + k2x * (1.0 / 3.0 - 0.25)
                  + k3x * (4.0 / 9.0 - 1.0 / 3.0) - 0.125 * k4x)
        ey = h * (k1y * (2.0 / 9.0 - 7.0 / 24.0) + k2y * (1.0 / 3.0 - 0.25)
                  + k3y * (4.0 / 9.0 - 1.0 / 3.0) - 0.125 * k4y)
        ez = h * (k1z * (2.0 / 9.0 - 7.0 / 24.0) + k2z * (1.0 / 3.0 - 0.25)
                  + k3z * (4.0 / 9.0 - 1.0 / 3.0) - 0.125 * k4z)
        sx = abs_tol + rel_tol * max(abs(x), abs(nx))
        sy = abs_tol + rel_tol * max(abs(y), abs(ny))
        sz = abs_tol + rel_tol * max(abs(z), abs(nz))
        err = math.sqrt(((ex / sx) ** 2 + (ey / sy) ** 2 + (ez / sz) ** 2) / 3.0)

        if err <= 1.0:
            # fill grid points inside (t, t+h] by cubic Hermite interpolation
            t_new = t + h
            eps = 1e-9 * max(1.0, t_new)
            while next_k < n_total and next_k * dt <= t_new + eps:
                u = (next_k * dt - t) / h
                u2 = u * u
                u3 = u2 * u
                b0 = 1.0 - 3.0 * u2 + 2.0 * u3
                b1 = u - 2.0 * u2 + u3
                b2 = 3.0 * u2 - 2.0 * u3
                b3 = u3 - u2
                gx = b0 * x + h * b1 * k1x + b2 * nx + h * b3 * k4x
                gy = b0 * y + h * b1 * k1y + b2 * ny + h * b3 * k4y
                gz = b0 * z + h * b1 * k1z + b2 * nz + h * b3 * k4z
                out[j, 0], out[j, 1], out[j, 2] = gx, gy, gz
                j += 1
                next_k += 1
            x, y, z = nx, ny, nz
            k1x, k1y, k1z = k4x, k4y, k4z  # FSAL
            t = t_new
            if not (-lim < x < lim and -lim < y < lim and -lim < z < lim):
                raise BlowUpError(t)
            fac = 0.9 * err ** (-1.0 / 3.0) if err > 0 else 5.0
        else:
            fac = max(0.2, 0.9 * err ** (-1.0 / 3.0))
        h *= min(5.0, max(0.2, fac))
        if h < 1e-14:
            raise BlowUpError(t, f"step size underflow at t={t:.6g}")
    while next_k < n_total:  # grid points lost to rounding at t_end
        out[j, 0], out[j, 1], out[j, 2] = x, y, z
        j += 1
        next_k += 1
    return out


def integrate(model: str, params, s0, cfg: IntegratorConfig) -> Trajectory:
    """Integrate a model and return samples on the uniform dt grid.

    Samples cover the half-open window [t_transient, t_total): exactly
    (t_total - t_transient)/dt of them, so a run of length t with spacing
    dt yields t/dt rows. Deterministic given cfg.rng_seed (the seed only
    matters when noise_std > 0).
    """
    if not all(math.isfinite(float(v)) for v in s0):
        raise ValueError("initial state must be finite")
    f = _rhs_closure(model, params)
    n_total = int(round(cfg.t_total / cfg.dt))
    n_skip = int(round(cfg.t_transient / cfg.dt))
    if n_total - n_skip < 2:
        raise ValueError("fewer than two output samples; increase t_total")

    if cfg.method == "rk4":
        samples = _integrate_rk4(f, s0, cfg.dt, n_total, n_skip)
    else:
        samples = _integrate_bs23(f, s0, cfg.dt, n_total, n_skip,
                                  cfg.abs_tol, cfg.rel_tol)

    if cfg.noise_std > 0:
        rng = np.random.default_rng(cfg.rng_seed)
        samples = samples + rng.normal(0.0, cfg.noise_std, samples.shape)

    return Trajectory(dt=cfg.dt, samples=samples, params=params,
                      seed=cfg.rng_seed, t0=n_skip * cfg.dt)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """CSV export with header t,x,y,z at full double precision."""
    t = traj.times()
    with open(path, "w") as fh:
        fh.write("t,x,y,z\n")
        for k in range(len(traj.samples)):
            row = traj.samples[k]
            fh.write("%.17g,%.17g,%.17g,%.17g\n" % (t[k], row[0], row[1], row[2]))


def read_trajectory_csv(path, params=None, seed: int = 0) -> Trajectory:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] != 4:
        raise ValueError(f"{path}: expected 4 columns t,x,y,z")
    t = data[:, 0]
    dt = float(t[1] - t[0])
    return Trajectory(dt=dt, samples=data[:, 1:], params=params, seed=seed,
                      t0=float(t[0]))
