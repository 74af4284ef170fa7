"""Hamiltonian geodesic flow on T*R^3 and its linearization.

Trajectories are parametrized by arclength (unit-speed initial data on the
annihilator circle bundle of the Reeb orbit). The variational flow carries two
tangent vectors corresponding to the angle and orbit-parameter directions of
the initial-data cylinder.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .structures import ReebOrbitSpec, StructureSpec


class StepFailure(Exception):
    """Integrator step size underflow / solver failure."""


class DomainExit(Exception):
    """Trajectory left the structure's declared domain before r_max."""

    def __init__(self, exit_radius: float, trajectory=None):
        super().__init__(f"trajectory left the domain at r = {exit_radius:.6g}")
        self.exit_radius = exit_radius
        self.trajectory = trajectory


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = math.inf
    dense_output: bool = True
    method: str = "DOP853"

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray
    h: np.ndarray  # (h0, h1, h2) = pairings of p with (f0, f1, f2)

    @property
    def energy2(self) -> float:
        """2H = h1^2 + h2^2."""
        return float(self.h[1] ** 2 + self.h[2] ** 2)


@dataclass(frozen=True)
class VariationalState:
    phase: PhasePoint
    v_theta: np.ndarray  # (dq, dp), 6 components
    v_z: np.ndarray


def phase_point(s: StructureSpec, q, p) -> PhasePoint:
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    h = s.frame(q).T @ p
    return PhasePoint(q, p, h)


def energy(s: StructureSpec, q, p) -> float:
    G = s.cometric.G(np.asarray(q, dtype=float))
    return 0.5 * float(p @ G @ p)


def hamiltonian_rhs(s: StructureSpec, x: PhasePoint) -> np.ndarray:
    """Phase velocity (qdot, pdot) of the geodesic Hamiltonian at x."""
    if not s.contains(x.q):
        raise ValueError(f"point {x.q} outside the structure domain")
    return _rhs6(s)(0.0, np.concatenate([x.q, x.p]))


def _rhs6(s: StructureSpec):
    com = s.cometric

    def rhs(t, y):
        q, p = y[:3], y[3:6]
        G, dG = com.pair(q)
        return np.concatenate([G @ p, [-0.5 * p @ dG[k] @ p for k in range(3)]])

    return rhs


def _rhs18(s: StructureSpec):
    com = s.cometric

    def rhs(t, y):
        q, p = y[:3], y[3:6]
        G, dG, d2G = com.all(q)
        out = np.empty(18)
        out[:3] = G @ p
        out[3] = -0.5 * (p @ dG[0] @ p)
        out[4] = -0.5 * (p @ dG[1] @ p)
        out[5] = -0.5 * (p @ dG[2] @ p)
        # mixed Hessian d(qdot)/dq and pure Hessian of H in q
        A = np.stack([dG[k] @ p for k in range(3)], axis=1)  # A[i, k]
        Hqq = 0.5 * np.einsum('klij,i,j->kl', d2G, p, p)
        for off in (6, 12):
            dq, dp = y[off:off + 3], y[off + 3:off + 6]
            out[off:off + 3] = A @ dq + G @ dp
            out[off + 3:off + 6] = -(Hqq @ dq) - (A.T @ dp)
        return out

    return rhs


def initial_phase(s: StructureSpec, orbit: ReebOrbitSpec, z: float,
                  theta: float) -> PhasePoint:
    """Unit covector at gamma(z) with angle theta in the orbit coframe."""
    q = np.asarray(orbit.gamma(z), dtype=float)
    p = orbit.covector(z, theta)
    e2 = float(p @ s.cometric.G(q) @ p)
    if abs(e2 - 1.0) > 1e-9:
        raise ValueError(f"orbit coframe is not orthonormal at z={z}: 2H={e2!r}")
    h = np.array([0.0, math.cos(theta), math.sin(theta)])
    return PhasePoint(q, p, h)


def initial_variation(s: StructureSpec, orbit: ReebOrbitSpec, z: float,
                      theta: float, h_z: float = 1e-5) -> VariationalState:
    """Tangent data for the angle and orbit directions at (z, theta).

    The angle direction rotates the covector analytically; the orbit direction
    moves the base along the Reeb field and transports the coframe, with the
    z-derivative taken by Richardson-extrapolated central differences.
    """
    x0 = initial_phase(s, orbit, z, theta)
    nu = orbit.coframe(z)
    dp_dtheta = -math.sin(theta) * nu[0] + math.cos(theta) * nu[1]
    v_theta = np.concatenate([np.zeros(3), dp_dtheta])

    def covec(zz):
        return orbit.covector(zz, theta)

    def pos(zz):
        return np.asarray(orbit.gamma(zz), dtype=float)

    def central(f, step):
        d1 = (f(z + step) - f(z - step)) / (2 * step)
        d2 = (f(z + step / 2) - f(z - step / 2)) / step
        return (4 * d2 - d1) / 3.0

    v_z = np.concatenate([central(pos, h_z), central(covec, h_z)])
    return VariationalState(x0, v_theta, v_z)


class _Trajectory:
    """Dense solution wrapper shared by the 6- and 18-dimensional flows."""

    def __init__(self, structure, sol, r_end, y_end):
        self.structure = structure
        self.sol = sol
        self.r_end = float(r_end)
        self._y_end = y_end

    def y(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r > self.r_end + 1e-12) or np.any(r < 0):
            raise ValueError("radius outside the integrated range")
        return self.sol(np.clip(r, 0.0, self.r_end))


class GeodesicTrajectory(_Trajectory):
    def state(self, r) -> PhasePoint:
        y = self.y(float(r))
        return phase_point(self.structure, y[:3], y[3:6])

    def positions(self, rs) -> np.ndarray:
        return self.y(rs)[:3].T

    def write_csv(self, path, spacing: float = 0.01):
        """Columns r,x,y,z,p1,p2,p3,h0,h1,h2 at uniform spacing."""
        rs = np.arange(0.0, self.r_end + spacing / 2, spacing)
        Y = self.y(rs)
        F = self.structure.frame_batch(Y[:3].T)
        H = np.einsum('nij,nj->ni', np.transpose(F, (0, 2, 1)), Y[3:6].T)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["r", "x", "y", "z", "p1", "p2", "p3", "h0", "h1", "h2"])
            for i, r in enumerate(rs):
                wr.writerow([f"{v:.12g}" for v in
                             (r, *Y[:3, i], *Y[3:6, i], *H[i])])


class VariationalTrajectory(_Trajectory):
    def state(self, r) -> VariationalState:
        y = self.y(float(r))
        return VariationalState(phase_point(self.structure, y[:3], y[3:6]),
                                y[6:12], y[12:18])


def _integrate(s, rhs, y0, r_max, cfg, ndim):
    margin0 = s.domain_margin(y0[:3])
    if margin0 <= 0:
        raise DomainExit(0.0)

    def exit_event(t, y):
        return s.domain_margin(y[:3])
    exit_event.terminal = True
    exit_event.direction = -1

    sol = solve_ivp(rhs, (0.0, float(r_max)), y0, method=cfg.method,
                    rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step,
                    dense_output=cfg.dense_output, events=exit_event)
    if sol.status == -1:
        raise StepFailure(sol.message)
    cls = GeodesicTrajectory if ndim == 6 else VariationalTrajectory
    if sol.status == 1:  # domain exit
        r_exit = float(sol.t_events[0][0])
        traj = cls(s, sol.sol, r_exit, sol.y[:, -1])
        raise DomainExit(r_exit, traj)
    return cls(s, sol.sol, float(r_max), sol.y[:, -1])


def integrate_geodesic(s: StructureSpec, x0: PhasePoint, r_max: float,
                       cfg: IntegratorConfig = DEFAULT_CONFIG) -> GeodesicTrajectory:
    if abs(x0.energy2 - 1.0) > 1e-9:
        raise ValueError("initial covector must satisfy 2H = 1 (unit speed)")
    y0 = np.concatenate([x0.q, x0.p])
    return _integrate(s, _rhs6(s), y0, r_max, cfg, 6)


def integrate_hamiltonian(s: StructureSpec, q0, p0, t_max: float,
                          cfg: IntegratorConfig = DEFAULT_CONFIG) -> GeodesicTrajectory:
    """Raw Hamiltonian flow without the unit-speed normalization."""
    y0 = np.concatenate([np.asarray(q0, float), np.asarray(p0, float)])
    return _integrate(s, _rhs6(s), y0, t_max, cfg, 6)


def integrate_variational(s: StructureSpec, v0: VariationalState, r_max: float,
                          cfg: IntegratorConfig = DEFAULT_CONFIG) -> VariationalTrajectory:
    y0 = np.concatenate([v0.phase.q, v0.phase.p, v0.v_theta, v0.v_z])
    return _integrate(s, _rhs18(s), y0, r_max, cfg, 18)


def symplectic_pairing(u: np.ndarray, v: np.ndarray) -> float:
    """Canonical pairing sigma(u, v) = u_p . v_q - v_p . u_q of two (dq, dp)."""
    return float(u[3:6] @ v[:3] - v[3:6] @ u[:3])
