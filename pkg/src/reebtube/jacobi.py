"""Traces of the pulled-back contact form along geodesics from a Reeb orbit.

For a geodesic with initial covector at angle theta on the unit annihilator
bundle, the trace records w_theta(r), w_z(r) (the pairings of the contact form
with the transported angle/orbit variations), their derivatives, the unwrapped
contact angle phi, and the Wronskian-type quantity a = wz*w'theta - wtheta*w'z
whose zeros are the focal radii.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .flow import (DEFAULT_CONFIG, IntegratorConfig, VariationalTrajectory,
                   initial_variation, integrate_variational)
from .structures import ReebOrbitSpec, StructureSpec
from .sturm import BoundFit


class ImmersionFailure(Exception):
    """The projective velocity vanished away from a focal radius."""


_OFFS = np.arange(-3.0, 4.0)


@lru_cache(maxsize=32)
def _stencil_weights(shift: int):
    """Derivative weights (orders 0..3) for nodes (_OFFS + shift) * h at 0."""
    nodes = _OFFS + shift
    V = np.vander(nodes, 7, increasing=True).T  # V[m, j] = nodes_j^m
    W = np.zeros((4, 7))
    for order in range(4):
        rhs = np.zeros(7)
        rhs[order] = math.factorial(order)
        W[order] = np.linalg.solve(V, rhs)
    return W


def _column_derivatives(w_at, rs: np.ndarray, horizon: float, h: float):
    """(w, w', w'', w''') columns for both trace components at the points rs.

    Values come from 7-node polynomial stencils on the dense solution, with
    nodes shifted to stay inside [0, horizon].
    """
    n = len(rs)
    shifts = np.zeros(n, dtype=int)
    lo = np.ceil(np.maximum(0.0, (3 * h - rs) / h - 1e-12)).astype(int)
    hi = -np.ceil(np.maximum(0.0, (rs + 3 * h - horizon) / h - 1e-12)).astype(int)
    shifts = np.clip(lo + hi, -3, 3)
    nodes = rs[:, None] + (_OFFS[None, :] + shifts[:, None]) * h
    flat = nodes.ravel()
    order = np.argsort(flat, kind="stable")
    wth_f, wz_f = w_at(flat[order])
    inv = np.empty_like(order)
    inv[order] = np.arange(len(order))
    wth = wth_f[inv].reshape(n, 7)
    wz = wz_f[inv].reshape(n, 7)
    out_t = np.zeros((4, n))
    out_z = np.zeros((4, n))
    for s in np.unique(shifts):
        m = shifts == s
        W = _stencil_weights(int(s))
        scale = np.array([1.0, 1.0 / h, 1.0 / h**2, 1.0 / h**3])
        out_t[:, m] = scale[:, None] * (W @ wth[m].T)
        out_z[:, m] = scale[:, None] * (W @ wz[m].T)
    return out_t, out_z


@dataclass
class JacobiTrace:
    structure: str
    z: float
    theta: float
    r: np.ndarray
    w_theta: np.ndarray
    w_z: np.ndarray
    d1_theta: np.ndarray
    d1_z: np.ndarray
    d2_theta: np.ndarray
    d2_z: np.ndarray
    d3_theta: np.ndarray
    d3_z: np.ndarray
    phi: np.ndarray
    a: np.ndarray
    horizon: float
    trajectory: VariationalTrajectory
    _w_at: object = None
    _h: float = 4e-3

    def eval_w(self, rr: float):
        """(w_theta, w_z) at a single radius, from the dense solution."""
        wth, wz = self._w_at(np.array([rr]))
        return float(wth[0]), float(wz[0])

    def eval_full(self, rr: float):
        """(w, w', w'', w''') pairs at a single radius."""
        t, zc = _column_derivatives(self._w_at, np.array([rr]), self.horizon, self._h)
        return t[:, 0], zc[:, 0]

    def eval_a(self, rr: float) -> float:
        t, zc = self.eval_full(rr)
        return float(zc[0] * t[1] - t[0] * zc[1])

    def write_csv(self, path, window=None):
        """Columns r,w_theta,w_z,phi,a,S,S_reg (S blank at r = 0)."""
        S = np.full_like(self.r, np.nan)
        mask = self.r > 1e-9
        if np.any(mask):
            S[mask] = _schwarzian_columns(self, mask)
            near = mask & (self.r < 0.15)
            if np.any(near) and np.sum(mask & (self.r <= 0.25)) >= 8:
                S[near] = _near_zero_schwarzian(self, self.r[near])
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["r", "w_theta", "w_z", "phi", "a", "S", "S_reg"])
            for i in range(len(self.r)):
                sreg = S[i] + 1.5 / self.r[i] ** 2 if self.r[i] > 1e-9 else np.nan
                wr.writerow([f"{v:.12g}" for v in
                             (self.r[i], self.w_theta[i], self.w_z[i],
                              self.phi[i], self.a[i], S[i], sreg)])


def jacobi_trace(s: StructureSpec, orbit: ReebOrbitSpec | None = None,
                 z: float = 0.0, theta: float = 0.0, r_max: float = 3.0,
                 cfg: IntegratorConfig = DEFAULT_CONFIG,
                 samples_per_unit: int = 2048,
                 refine_roots: bool = True) -> JacobiTrace:
    """Integrate the variational flow and sample the contact-form trace."""
    orbit = orbit if orbit is not None else s.default_orbit()
    v0 = initial_variation(s, orbit, z, theta)
    traj = integrate_variational(s, v0, r_max, cfg)
    horizon = traj.r_end

    def w_at(rr):
        Y = traj.y(rr)
        om = s.reeb_form_batch(Y[:3].T)
        wth = np.einsum('ni,in->n', om, Y[6:9])
        wz = np.einsum('ni,in->n', om, Y[12:15])
        return wth, wz

    n = max(int(round(samples_per_unit * horizon)), 64) + 1
    rs = np.linspace(0.0, horizon, n)
    h = min(4e-3, horizon / 12.0)
    t, zc = _column_derivatives(w_at, rs, horizon, h)
    phi = _unwrapped_angle(t[0], zc[0])
    a = zc[0] * t[1] - t[0] * zc[1]
    trace = JacobiTrace(getattr(s, "name", "structure"), z, theta, rs,
                        t[0], zc[0], t[1], zc[1], t[2], zc[2], t[3], zc[3],
                        phi, a, horizon, traj, _w_at=w_at, _h=h)
    if refine_roots:
        _refine_grid(trace, w_at, h)
    return trace


def _unwrapped_angle(wth, wz):
    phi = np.unwrap(np.arctan2(wth, wz))
    return phi - phi[0]


def _refine_grid(trace: JacobiTrace, w_at, h, pad: float = 0.05, factor: int = 8):
    """Insert 8x finer samples around angle and focal roots (in place)."""
    windows = []
    kmax = int(np.floor(trace.phi.max() / math.pi)) + 1
    for k in range(1, kmax + 1):
        idx = np.where((trace.phi[:-1] < k * math.pi) & (trace.phi[1:] >= k * math.pi))[0]
        windows.extend(trace.r[idx])
    sign = np.sign(trace.a)
    idx = np.where(sign[:-1] * sign[1:] < 0)[0]
    windows.extend(trace.r[idx])
    if not windows:
        return
    base_dr = trace.r[1] - trace.r[0]
    extra = []
    for c in windows:
        lo, hi = max(0.0, c - pad), min(trace.horizon, c + pad)
        extra.append(np.arange(lo, hi, base_dr / factor))
    new_r = np.unique(np.concatenate([trace.r] + extra))
    t, zc = _column_derivatives(w_at, new_r, trace.horizon, h)
    trace.r = new_r
    trace.w_theta, trace.d1_theta, trace.d2_theta, trace.d3_theta = t
    trace.w_z, trace.d1_z, trace.d2_z, trace.d3_z = zc
    trace.phi = _unwrapped_angle(t[0], zc[0])
    trace.a = zc[0] * t[1] - t[0] * zc[1]


# ---------------------------------------------------------------------------
# initial jet


@dataclass(frozen=True)
class JetReport:
    jet: tuple            # (wtheta, wtheta', wtheta'', wtheta''', wz, wz')(0)
    deviations: tuple     # against (0, 0, 1, 0, 1, 0)
    c4: float             # quartic coefficient of wtheta ~ r^2/2 + c4 r^4
    c2: float             # quadratic coefficient of wz ~ 1 + c2 r^2

    @property
    def max_deviation(self) -> float:
        return max(self.deviations)


def check_initial_jet(trace: JacobiTrace, fit_window: float = 0.1) -> JetReport:
    """Initial jet of the trace against the universal values (0,0,1,0,1,0)."""
    t0, z0 = trace.eval_full(0.0)
    jet = (t0[0], t0[1], t0[2], t0[3], z0[0], z0[1])
    target = (0.0, 0.0, 1.0, 0.0, 1.0, 0.0)
    dev = tuple(abs(a - b) for a, b in zip(jet, target))
    m = (trace.r > 1e-6) & (trace.r <= fit_window)
    rr = trace.r[m]
    c4 = float(np.polyfit(rr**2, trace.w_theta[m] / rr**2 - 0.5, 1)[0])
    c2 = float(np.polyfit(rr**2, trace.w_z[m] - 1.0, 1)[0])
    return JetReport(jet, dev, c4, c2)


# ---------------------------------------------------------------------------
# roots of the trace


@dataclass(frozen=True)
class FirstSingular:
    r: float | None
    horizon: float

    @property
    def found(self) -> bool:
        return self.r is not None


def _refine_angle_crossing(trace, r_lo, r_hi, k):
    """Radius where the unwrapped angle crosses k*pi, within [r_lo, r_hi]."""
    if k % 2 == 1:
        def g(rr):
            wth, wz = trace.eval_w(rr)
            return math.atan2(wth, wz) % (2 * math.pi) - math.pi
    else:
        def g(rr):
            wth, wz = trace.eval_w(rr)
            return math.atan2(wth, wz)
    glo, ghi = g(r_lo), g(r_hi)
    if glo == 0.0:
        return r_lo
    if glo * ghi > 0:
        # tangential grid crossing; fall back to the w_theta zero
        return brentq(lambda rr: trace.eval_w(rr)[0], r_lo, r_hi, xtol=1e-12)
    return brentq(g, r_lo, r_hi, xtol=1e-12)


def first_singular_radius(trace: JacobiTrace) -> FirstSingular:
    """First radius with unwrapped angle pi, refined on the dense solution."""
    pi = math.pi
    idx = np.where((trace.phi[:-1] < pi) & (trace.phi[1:] >= pi))[0]
    if len(idx) == 0:
        return FirstSingular(None, trace.horizon)
    i = idx[0]
    r = _refine_angle_crossing(trace, trace.r[i], trace.r[i + 1], 1)
    return FirstSingular(float(r), trace.horizon)


def focal_radii(trace: JacobiTrace, tangential_tol: float = 1e-9) -> list:
    """Zeros of a(r) on (0, horizon]: sign changes plus tangential touches."""
    rs, a = trace.r, trace.a
    scale = np.max(np.abs(a))
    roots = []
    interior = rs > 1e-9
    sgn = np.sign(a)
    for i in np.where((sgn[:-1] * sgn[1:] < 0) & interior[:-1])[0]:
        roots.append(brentq(trace.eval_a, rs[i], rs[i + 1], xtol=1e-12))
    # tangential zeros: local minima of |a| that dip below tolerance
    mag = np.abs(a)
    for i in range(2, len(rs) - 2):
        if not interior[i]:
            continue
        if mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1] and mag[i] < tangential_tol * scale:
            if sgn[i - 1] == sgn[i + 1] and sgn[i - 1] != 0:
                denom = mag[i - 1] - 2 * mag[i] + mag[i + 1]
                off = 0.0 if denom == 0 else 0.5 * (mag[i - 1] - mag[i + 1]) / denom
                roots.append(float(rs[i] + off * (rs[i + 1] - rs[i])))
    return sorted(set(np.round(roots, 12)))


# ---------------------------------------------------------------------------
# projective curvature (Schwarzian derivative) of the trace


@dataclass
class SchwarzianSample:
    r: np.ndarray
    S: np.ndarray
    S_reg: np.ndarray     # S + 3/(2 r^2)
    z: float = 0.0
    theta: float = 0.0


def _quotient_derivs(N, N1, N2, N3, D, D1, D2, D3):
    v = N / D
    v1 = (N1 - D1 * v) / D
    v2 = (N2 - D2 * v - 2 * D1 * v1) / D
    v3 = (N3 - D3 * v - 3 * D2 * v1 - 3 * D1 * v2) / D
    return v1, v2, v3


def _schwarzian_columns(trace: JacobiTrace, mask) -> np.ndarray:
    """S at the masked grid points, switching homogeneous coordinate pointwise."""
    Nt = (trace.w_theta[mask], trace.d1_theta[mask], trace.d2_theta[mask],
          trace.d3_theta[mask])
    Nz = (trace.w_z[mask], trace.d1_z[mask], trace.d2_z[mask], trace.d3_z[mask])
    use_t = np.abs(Nz[0]) >= np.abs(Nt[0])
    S = np.empty(Nt[0].shape)
    for branch, sel in ((True, use_t), (False, ~use_t)):
        if not np.any(sel):
            continue
        if branch:
            v1, v2, v3 = _quotient_derivs(*(c[sel] for c in Nt),
                                          *(c[sel] for c in Nz))
        else:
            v1, v2, v3 = _quotient_derivs(*(c[sel] for c in Nz),
                                          *(c[sel] for c in Nt))
        if np.any(np.abs(v1) < 1e-13):
            raise ImmersionFailure("projective velocity vanished in the window")
        S[sel] = v3 / v1 - 1.5 * (v2 / v1) ** 2
    return S


def _near_zero_schwarzian(trace: JacobiTrace, rr: np.ndarray,
                          fit_window: float = 0.25) -> np.ndarray:
    """S from the even-polynomial model v' = r (c0 + c2 r^2 + c4 r^4)."""
    m = (trace.r > 1e-9) & (trace.r <= fit_window)
    rs = trace.r[m]
    v1 = (trace.d1_theta[m] * trace.w_z[m]
          - trace.w_theta[m] * trace.d1_z[m]) / trace.w_z[m] ** 2
    coef = np.polynomial.polynomial.polyfit(rs**2, v1 / rs, 2)
    c0, c2, c4 = coef
    g = c0 + c2 * rr**2 + c4 * rr**4
    v1m = rr * g
    v2m = c0 + 3 * c2 * rr**2 + 5 * c4 * rr**4
    v3m = 6 * c2 * rr + 20 * c4 * rr**3
    return v3m / v1m - 1.5 * (v2m / v1m) ** 2


def schwarzian_numeric(trace: JacobiTrace, window) -> SchwarzianSample:
    """Schwarzian derivative of the projectivized trace on the window."""
    r_lo, r_hi = window
    if r_lo <= 0:
        raise ValueError("window must stay strictly right of r = 0")
    mask = (trace.r >= r_lo) & (trace.r <= r_hi)
    rr = trace.r[mask]
    S = _schwarzian_columns(trace, mask)
    near = rr < 0.15
    if np.any(near):
        S[near] = _near_zero_schwarzian(trace, rr[near])
    return SchwarzianSample(rr, S, S + 1.5 / rr**2, trace.z, trace.theta)


def schwarzian_frame_formula(trace: JacobiTrace, window) -> SchwarzianSample:
    """Independent evaluation through the adapted-frame identities.

    Uses S/2 = B - A'/2 - A^2/4 with A = (w_theta w_z'' - w_z w_theta'')/a and
    B = -(w_theta' w_z'' - w_z' w_theta'')/a; A' is computed analytically from
    the stored third derivatives (a' = -A a).
    """
    r_lo, r_hi = window
    mask = (trace.r >= r_lo) & (trace.r <= r_hi)
    rr = trace.r[mask]
    wt, wz = trace.w_theta[mask], trace.w_z[mask]
    t1, z1 = trace.d1_theta[mask], trace.d1_z[mask]
    t2, z2 = trace.d2_theta[mask], trace.d2_z[mask]
    t3, z3 = trace.d3_theta[mask], trace.d3_z[mask]
    a = trace.a[mask]
    U = wt * z2 - wz * t2
    A = U / a
    B = -(t1 * z2 - z1 * t2) / a
    # a' = w_z w_theta'' - w_theta w_z'' = -U, hence A' = U'/a + (U/a)^2
    dU = t1 * z2 + wt * z3 - z1 * t2 - wz * t3
    Adot = dU / a + (U * U) / (a * a)
    S = 2.0 * (B - Adot / 2.0 - A * A / 4.0)
    return SchwarzianSample(rr, S, S + 1.5 / rr**2, trace.z, trace.theta)


def frame_formula_components(trace: JacobiTrace, window):
    """(r, A, B) on the window, exposed for diagnostic tests."""
    mask = (trace.r >= window[0]) & (trace.r <= window[1])
    wt, wz = trace.w_theta[mask], trace.w_z[mask]
    t2, z2 = trace.d2_theta[mask], trace.d2_z[mask]
    t1, z1 = trace.d1_theta[mask], trace.d1_z[mask]
    a = trace.a[mask]
    A = (wt * z2 - wz * t2) / a
    B = -(t1 * z2 - z1 * t2) / a
    return trace.r[mask], A, B


# ---------------------------------------------------------------------------
# upper-bound fit for the comparison theorem


def fit_schwarzian_bound(samples, r_range, max_points: int = 64) -> BoundFit:
    """Smallest valid pair (k1, k2) with S/2 <= -3/(4 r^2) + k1 r + k2 r^2.

    Per curve this is the one-sided min-max (Chebyshev) linear fit of
    g = S/2 + 3/(4 r^2) by k1 r + k2 r^2 from above, solved by exhaustive
    enumeration of active-constraint vertices; the bound touches the samples
    at >= 2 points. Curves are then combined by componentwise maximum, which
    preserves validity for every sampled covector.
    """
    if isinstance(samples, SchwarzianSample):
        samples = [samples]
    k1s, k2s = [], []
    for sample in samples:
        m = (sample.r >= r_range[0]) & (sample.r <= r_range[1])
        rs, gv = sample.r[m], 0.5 * sample.S[m] + 0.75 / sample.r[m] ** 2
        if len(rs) < 20:
            raise ValueError("need at least 20 samples covering the range")
        if len(rs) > max_points:
            idx = np.unique(np.linspace(0, len(rs) - 1, max_points).astype(int))
            rs, gv = rs[idx], gv[idx]
        k1, k2 = _onesided_vertex_fit(rs, gv)
        k1s.append(k1)
        k2s.append(k2)
    return BoundFit.schwarzian(max(k1s), max(k2s))


def _onesided_vertex_fit(rs, gv):
    n = len(rs)
    b1, b2 = rs, rs * rs
    cands = []
    # vertices with two touching (equality) constraints
    i, j = np.triu_indices(n, k=1)
    det = b1[i] * b2[j] - b1[j] * b2[i]
    ok = np.abs(det) > 1e-14
    k1 = (gv[i] * b2[j] - gv[j] * b2[i])[ok] / det[ok]
    k2 = (b1[i] * gv[j] - b1[j] * gv[i])[ok] / det[ok]
    cands = np.column_stack([k1, k2])
    # vertices with one touching constraint and an extreme slope/curvature
    with np.errstate(divide="ignore", invalid="ignore"):
        cands = np.vstack([cands,
                           np.column_stack([gv / b1, np.zeros(n)]),
                           np.column_stack([np.zeros(n), gv / b2])])
    cands = cands[np.all(np.isfinite(cands), axis=1)]
    resid = cands[:, 0][:, None] * b1[None] + cands[:, 1][:, None] * b2[None] - gv[None]
    feasible = resid.min(axis=1) >= -1e-10 * max(1.0, np.max(np.abs(gv)))
    cands = cands[feasible]
    slack = resid[feasible].max(axis=1)
    # minimize the worst slack; break ties lexicographically in (k2, k1)
    order = np.lexsort((cands[:, 0], cands[:, 1], slack))
    best = order[0]
    return float(cands[best, 0]), float(cands[best, 1])
