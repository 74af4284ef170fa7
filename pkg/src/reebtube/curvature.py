"""Canonical-curvature comparison: the 4-dimensional Jacobi-type system,
its Riccati majorization, and the blow-up radius tau(A, C)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .flow import StepFailure
from .sturm import BoundFit


@dataclass(frozen=True)
class CurvatureProfile:
    """Canonical curvatures along a geodesic, supplied as functions of r."""
    R_a: Callable[[float], float]
    R_c: Callable[[float], float]
    label: str = ""


def kcontact_curvatures(kappa: float) -> CurvatureProfile:
    """Constant profile (kappa, 0) of the constant-curvature models."""
    return CurvatureProfile(lambda r: float(kappa), lambda r: 0.0,
                            label=f"kcontact(kappa={kappa:g})")


@dataclass
class Jacobi4Solution:
    r: np.ndarray
    x0: np.ndarray
    x2: np.ndarray
    first_zero_x0: float | None
    first_zero_x2: float | None
    _sol: object = None

    def x0_at(self, rr):
        return self._sol(rr)[0]

    def x2_at(self, rr):
        return self._sol(rr)[2]


def solve_jacobi4(prof: CurvatureProfile, r_max: float,
                  rtol: float = 1e-11, n_samples: int = 2000) -> Jacobi4Solution:
    """Integrate x' = (x1, x2, x3 - R_a x1, R_c x0) from x(0) = (0, 0, 1, 0)."""
    def rhs(r, x):
        return [x[1], x[2], x[3] - prof.R_a(r) * x[1], prof.R_c(r) * x[0]]

    def ev0(r, x):
        return x[0]
    ev0.terminal = False

    def ev2(r, x):
        return x[2]
    ev2.terminal = False

    sol = solve_ivp(rhs, (0.0, r_max), [0.0, 0.0, 1.0, 0.0], method="DOP853",
                    rtol=rtol, atol=1e-13, dense_output=True, events=(ev0, ev2))
    if sol.status == -1:
        raise StepFailure(sol.message)
    rs = np.linspace(0.0, r_max, n_samples)
    Y = sol.sol(rs)

    def first_zero(component, events):
        ts = [float(t) for t in events if t > 1e-9]
        vals = Y[component]
        # tangential zeros produce no event; scan the sampled magnitude
        scale = np.max(np.abs(vals))
        mag = np.abs(vals)
        for i in range(2, len(rs) - 1):
            if mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1] and mag[i] < 1e-6 * scale:
                from scipy.optimize import minimize_scalar
                res = minimize_scalar(lambda t: abs(sol.sol(t)[component]),
                                      bracket=(rs[i - 1], rs[i], rs[i + 1]))
                if abs(res.fun) < 1e-8 * scale:
                    ts.append(float(res.x))
        return min(ts) if ts else None

    return Jacobi4Solution(rs, Y[0], Y[2],
                           first_zero(0, sol.t_events[0]),
                           first_zero(2, sol.t_events[1]),
                           _sol=sol.sol)


def tau_AC(A: float, C: float) -> float:
    """Blow-up radius integral(0, inf) du / (A u^2 + C u + 1).

    Evaluated both in closed form (by discriminant sign) and by adaptive
    quadrature on the compactified interval; the two must agree to 1e-10 and
    the closed form is returned.
    """
    if A <= 0 or C <= 0:
        raise ValueError("tau(A, C) requires A > 0 and C > 0")
    disc = 4.0 * A - C * C
    if disc > 0:
        rt = math.sqrt(disc)
        closed = (2.0 / rt) * (math.pi / 2.0 - math.atan(C / rt))
    elif disc == 0:
        closed = 2.0 / C
    else:
        rt = math.sqrt(-disc)
        closed = math.log((C + rt) / (C - rt)) / rt

    # u = s/(1-s) maps [0, 1) onto [0, inf)
    def integrand(sv):
        return 1.0 / (A * sv * sv + C * sv * (1.0 - sv) + (1.0 - sv) ** 2)

    numeric, _ = quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    if abs(numeric - closed) > 1e-10:
        raise RuntimeError(
            f"tau({A}, {C}): closed form {closed!r} and quadrature {numeric!r} disagree")
    return closed


def riccati_blowup(A: float, C: float, u_cap: float = 1e8) -> float:
    """Blow-up time of u' = A u^2 + C u + 1, u(0) = 0.

    Integrates to u = u_cap and adds the analytic tail 1/(A u_cap) of the
    remaining du/(A u^2) integral.
    """
    if A <= 0 or C <= 0:
        raise ValueError("requires A > 0 and C > 0")

    def rhs(t, y):
        return [A * y[0] * y[0] + C * y[0] + 1.0]

    def cap(t, y):
        return y[0] - u_cap
    cap.terminal = True

    sol = solve_ivp(rhs, (0.0, 10.0), [0.0], method="DOP853", rtol=1e-12,
                    atol=1e-12, events=cap)
    if sol.status != 1:
        raise StepFailure("Riccati solution did not reach the cap")
    t_cap = float(sol.t_events[0][0])
    return t_cap + 1.0 / (A * u_cap)


def curvature_bound_from_profiles(profiles, r_range, n: int = 400) -> BoundFit:
    """(A, C) = suprema of sqrt(1 + R^2) over the profiles and the range."""
    profiles = list(profiles)
    if not profiles:
        raise ValueError("need at least one curvature profile")
    rs = np.linspace(r_range[0], r_range[1], n)
    A = max(math.sqrt(1.0 + prof.R_a(r) ** 2) for prof in profiles for r in rs)
    C = max(math.sqrt(1.0 + prof.R_c(r) ** 2) for prof in profiles for r in rs)
    return BoundFit.curvature(A, C)
