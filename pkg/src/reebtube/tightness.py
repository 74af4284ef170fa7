"""Per-orbit tightness analysis: aggregate singular/focal radii over a sample
grid of the unit annihilator bundle, attach the two comparison bounds, and
extract overtwisted-disk boundary curves."""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import jacobi
from .curvature import curvature_bound_from_profiles, kcontact_curvatures, tau_AC
from .flow import DEFAULT_CONFIG, DomainExit
from .structures import KContactModel, RadialModel, ReebOrbitSpec, StructureSpec
from .sturm import r_star

SCHEMA_VERSION = 1


class NotOvertwistedWithinHorizon(Exception):
    """A requested disk boundary needs a singular radius on every ray."""


@dataclass
class SampleResult:
    z: float
    theta: float
    r_o: float | None
    first_focal: float | None
    horizon: float
    error: str | None = None


@dataclass
class TightnessReport:
    structure: str
    orbit: str
    z_grid: list
    theta_grid: list
    samples: list
    r_o_minus: float | None
    r_o_plus: float | None
    all_found: bool
    none_found: bool
    focal_min: float | None
    r_inj: float
    r_inj_kind: str                      # "analytic" or "focal proxy"
    schwarzian_fit: tuple | None         # (k1, k2) on the fit window
    fit_window: tuple | None
    rho_thm_b: float | None
    curvature_bound: tuple | None        # (A, C)
    rho_thm_c: float | None
    conclusion: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, float) and math.isinf(v):
                return "inf"
            if isinstance(v, np.floating):
                return float(v)
            return v

        d = asdict(self)

        def walk(obj):
            if isinstance(obj, dict):
                return {k: walk(v) for k, v in obj.items()}
            if isinstance(obj, (list, tuple)):
                return [walk(v) for v in obj]
            return enc(obj)

        return walk(d)

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def _is_k_contact(s: StructureSpec) -> bool:
    if isinstance(s, KContactModel):
        return True
    if isinstance(s, RadialModel):
        # chi vanishes iff alpha' beta'' = alpha'' beta' identically
        rs = np.linspace(0.2, min(2.5, s.r_max * 0.9), 40)
        d = [s.alpha.deriv(r) * s.beta.deriv(r, 2)
             - s.alpha.deriv(r, 2) * s.beta.deriv(r) for r in rs]
        return max(abs(v) for v in d) < 1e-10
    return getattr(s, "is_k_contact", False)


def _one_sample(s, orbit, z, theta, r_max, cfg, samples_per_unit):
    try:
        trace = jacobi.jacobi_trace(s, orbit, z, theta, r_max, cfg,
                                    samples_per_unit=samples_per_unit)
    except DomainExit as exc:
        return None, SampleResult(z, theta, None, None, exc.exit_radius,
                                  error=f"domain exit at r={exc.exit_radius:.6g}")
    fs = jacobi.first_singular_radius(trace)
    focs = jacobi.focal_radii(trace)
    return trace, SampleResult(z, theta, fs.r, focs[0] if focs else None,
                               trace.horizon)


def analyze_orbit(s: StructureSpec, orbit: ReebOrbitSpec | None = None,
                  n_z: int = 8, n_theta: int = 32, r_max: float = 6.0,
                  cfg=DEFAULT_CONFIG, fit_window: tuple = (0.2, 2.0),
                  curvature_profiles=None, samples_per_unit: int = 1024,
                  threads: int | None = None) -> TightnessReport:
    """Run the trace pipeline over an (n_z x n_theta) grid and aggregate.

    Per-sample failures are recorded in the report rather than raised. The
    theta grid wraps (endpoint excluded); z samples span the orbit range.
    """
    orbit = orbit if orbit is not None else s.default_orbit()
    z_lo, z_hi = orbit.z_range
    if orbit.period is not None:
        zs = np.linspace(0.0, orbit.period, n_z, endpoint=False)
    else:
        zs = np.linspace(z_lo, z_hi, n_z)
    thetas = np.linspace(0.0, 2 * math.pi, n_theta, endpoint=False)

    grid = [(z, th) for z in zs for th in thetas]
    threads = threads or int(os.environ.get("TIGHTNESS_THREADS", "1"))

    def work(zt):
        return _one_sample(s, orbit, zt[0], zt[1], r_max, cfg, samples_per_unit)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, grid))
    else:
        results = [work(zt) for zt in grid]

    traces = [t for t, _ in results if t is not None]
    samples = [rec for _, rec in results]

    found = [rec.r_o for rec in samples if rec.r_o is not None]
    r_o_minus = min(found) if found else None
    r_o_plus = max(found) if found else None
    all_found = len(found) == len(samples) and samples
    none_found = not found
    focals = [rec.first_focal for rec in samples if rec.first_focal is not None]
    focal_min = min(focals) if focals else None

    if s.r_inj is not None:
        r_inj, r_inj_kind = s.r_inj, "analytic"
    else:
        r_inj = focal_min if focal_min is not None else math.inf
        r_inj_kind = "focal proxy"

    fit = rho_b = None
    window = None
    if traces:
        hi = min(fit_window[1], min(t.horizon for t in traces) * 0.98)
        window = (fit_window[0], hi)
        try:
            sws = [jacobi.schwarzian_numeric(t, window) for t in traces]
            fit_res = jacobi.fit_schwarzian_bound(sws, window)
            fit = fit_res.params
            rho_b = min(r_inj, r_star(*fit))
        except (ValueError, jacobi.ImmersionFailure):
            pass

    if curvature_profiles is None and isinstance(s, KContactModel):
        curvature_profiles = [kcontact_curvatures(s.kappa)]
    cbound = rho_c = None
    if curvature_profiles:
        horizon = min((rec.horizon for rec in samples), default=r_max)
        cb = curvature_bound_from_profiles(curvature_profiles, (0.0, horizon))
        cbound = cb.params
        rho_c = min(r_inj, tau_AC(*cbound))

    conclusion = _conclude(s, r_inj, r_inj_kind, r_o_minus, r_o_plus,
                           all_found, none_found, r_max)

    return TightnessReport(
        structure=getattr(s, "name", "structure"), orbit=orbit.label,
        z_grid=[float(z) for z in zs], theta_grid=[float(t) for t in thetas],
        samples=samples, r_o_minus=r_o_minus, r_o_plus=r_o_plus,
        all_found=bool(all_found), none_found=none_found, focal_min=focal_min,
        r_inj=r_inj, r_inj_kind=r_inj_kind, schwarzian_fit=fit,
        fit_window=window, rho_thm_b=rho_b, curvature_bound=cbound,
        rho_thm_c=rho_c, conclusion=conclusion)


def _conclude(s, r_inj, r_inj_kind, r_minus, r_plus, all_found, none_found,
              r_max) -> dict:
    """Interval for the tightness radius and a verdict where one is justified."""
    out: dict = {}
    if none_found:
        out["lower"] = min(r_inj, r_max)
        out["upper"] = r_inj
        if _is_k_contact(s):
            # no return of the trace before the focal radius: radius equals r_inj
            out["verdict"] = "tight up to the injectivity radius"
            out["r_tight"] = r_inj
        elif isinstance(s, RadialModel) and math.isinf(s.first_beta_zero()):
            out["verdict"] = "tight (no singular locus)"
            out["r_tight"] = r_inj
        else:
            out["verdict"] = "no singular radius within horizon"
        return out
    lower = min(r_inj, r_minus)
    upper = min(r_inj, r_plus)
    out["lower"], out["upper"] = lower, upper
    if not all_found:
        out["verdict"] = "partial: some rays have no singular radius within horizon"
        out["partial"] = True
        return out
    if r_plus < r_inj:
        if r_inj_kind == "analytic":
            out["verdict"] = "overtwisted"
            if isinstance(s, RadialModel):
                out["r_tight"] = s.first_beta_zero()
        else:
            out["verdict"] = "candidate overtwisted disk (injectivity radius is a proxy)"
    else:
        out["verdict"] = "singular radii beyond injectivity radius"
    return out


# ---------------------------------------------------------------------------
# disk boundaries


@dataclass
class DiskBoundary:
    z: float
    theta: np.ndarray
    points: np.ndarray        # (n, 3), theta wraps: first and last coincide
    r_o: np.ndarray
    closure_defect: float

    def is_simple(self) -> bool:
        """No self-intersection of the (x, y) projection."""
        pts = self.points[:-1, :2]
        n = len(pts)
        for i in range(n):
            a1, a2 = pts[i], pts[(i + 1) % n]
            for j in range(i + 2, n):
                if i == 0 and j == n - 1:
                    continue
                b1, b2 = pts[j], pts[(j + 1) % n]
                if _segments_cross(a1, a2, b1, b2):
                    return False
        return True

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("theta,x,y,z,r_o\n")
            for th, pt, ro in zip(self.theta, self.points, self.r_o):
                fh.write(f"{th:.12g},{pt[0]:.12g},{pt[1]:.12g},{pt[2]:.12g},{ro:.12g}\n")


def _segments_cross(a1, a2, b1, b2) -> bool:
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    d1, d2 = orient(b1, b2, a1), orient(b1, b2, a2)
    d3, d4 = orient(a1, a2, b1), orient(a1, a2, b2)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def disk_boundary(s: StructureSpec, orbit: ReebOrbitSpec | None = None,
                  z: float = 0.0, n_theta: int = 64, r_max: float = 4.0,
                  cfg=DEFAULT_CONFIG) -> DiskBoundary:
    """Boundary polyline of the candidate overtwisted disk at orbit point z.

    Every ray must reach its singular radius before the horizon and before
    its first focal radius; otherwise NotOvertwistedWithinHorizon is raised.
    """
    orbit = orbit if orbit is not None else s.default_orbit()
    thetas = np.linspace(0.0, 2 * math.pi, n_theta + 1)
    pts, ros = [], []
    for th in thetas:
        trace = jacobi.jacobi_trace(s, orbit, z, th, r_max, cfg,
                                    samples_per_unit=1024)
        fs = jacobi.first_singular_radius(trace)
        if not fs.found:
            raise NotOvertwistedWithinHorizon(
                f"no singular radius on the ray theta={th:.4f} up to r={r_max}")
        focs = jacobi.focal_radii(trace)
        if focs and focs[0] < fs.r:
            raise NotOvertwistedWithinHorizon(
                f"focal radius {focs[0]:.6f} precedes the singular radius on "
                f"theta={th:.4f}")
        pts.append(trace.trajectory.y(fs.r)[:3])
        ros.append(fs.r)
    pts = np.array(pts)
    defect = float(np.linalg.norm(pts[0] - pts[-1]))
    return DiskBoundary(z, thetas, pts, np.array(ros), defect)


# ---------------------------------------------------------------------------
# singular locus sampling and focal comparison


def singular_locus_sample(s: StructureSpec, orbit: ReebOrbitSpec | None = None,
                          n_z: int = 4, n_theta: int = 8, r_max: float = 6.0,
                          cfg=DEFAULT_CONFIG) -> list:
    """All crossings of the unwrapped angle through multiples of pi.

    Returns tuples (z, theta, r, k) with phi(r) = k pi, k >= 1.
    """
    orbit = orbit if orbit is not None else s.default_orbit()
    z_lo, z_hi = orbit.z_range
    zs = np.linspace(z_lo, z_hi, n_z)
    thetas = np.linspace(0.0, 2 * math.pi, n_theta, endpoint=False)
    out = []
    for z in zs:
        for th in thetas:
            trace = jacobi.jacobi_trace(s, orbit, z, th, r_max, cfg,
                                        samples_per_unit=1024)
            kmax = int(np.floor(trace.phi.max() / math.pi))
            for k in range(1, kmax + 1):
                lev = k * math.pi
                idx = np.where((trace.phi[:-1] < lev) & (trace.phi[1:] >= lev))[0]
                if len(idx) == 0:
                    continue
                i = idx[0]
                r = jacobi._refine_angle_crossing(trace, trace.r[i],
                                                  trace.r[i + 1], k)
                out.append((float(z), float(th), float(r), k))
    return out


@dataclass(frozen=True)
class FocalBoundReport:
    ok: bool
    bound: float
    measured: tuple


def focal_lower_bound_check(s: KContactModel, kappa_plus: float,
                            r_max: float = 10.0, n_theta: int = 4,
                            tol: float = 1e-6) -> FocalBoundReport:
    """Measured first focal radii against pi/sqrt(kappa_plus) (inf if <= 0)."""
    if s.kappa > kappa_plus + 1e-12:
        raise ValueError("requires kappa <= kappa_plus")
    bound = math.pi / math.sqrt(kappa_plus) if kappa_plus > 0 else math.inf
    if s.kappa > 0:
        r_max = min(r_max, 2 * math.pi / math.sqrt(s.kappa) * 0.98)
    measured = []
    for th in np.linspace(0.0, 2 * math.pi, n_theta, endpoint=False):
        trace = jacobi.jacobi_trace(s, theta=th, r_max=r_max,
                                    samples_per_unit=1024)
        focs = jacobi.focal_radii(trace)
        measured.append(focs[0] if focs else math.inf)
    ok = all(m >= bound - tol for m in measured)
    return FocalBoundReport(ok, bound, tuple(measured))
