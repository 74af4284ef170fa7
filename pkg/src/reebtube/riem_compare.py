"""Riemannian-extension tube estimate and the model comparison tables."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curvature import curvature_bound_from_profiles, kcontact_curvatures, tau_AC


class ComplexB(Exception):
    """Radicand of the b-coefficient is negative; the estimate presumes it real."""


@dataclass(frozen=True)
class EkmInputs:
    """Inputs of the Riemannian tube estimate; unknown terms may be +inf."""
    r_inj_R: float
    inj_g: float
    sec_abs: float          # bound on |sectional curvature|
    K_pos: float            # positive upper bound on sectional curvature
    ric_f0_min: float
    theta_prime: float = 1.0

    def __post_init__(self):
        if self.K_pos < 0 or self.sec_abs < 0:
            raise ValueError("curvature bounds must be nonnegative")


def rho_ekm(inputs: EkmInputs) -> float:
    """min{r_inj^R, inj(g)/2, pi/(2 sqrt(K)), 2/(sqrt(2a + b^2) + b)}."""
    a = (4.0 / 3.0) * inputs.sec_abs
    rad = inputs.theta_prime ** 2 / 4.0 - 0.5 * inputs.ric_f0_min
    if rad < 0:
        raise ComplexB(f"negative radicand {rad!r} in the b coefficient")
    b = inputs.theta_prime / 2.0 + math.sqrt(rad)
    terms = [inputs.r_inj_R, inputs.inj_g / 2.0,
             math.pi / (2.0 * math.sqrt(inputs.K_pos)) if inputs.K_pos > 0 else math.inf,
             2.0 / (math.sqrt(2.0 * a + b * b) + b)]
    return min(terms)


def ksect(kappa: float, n0: float) -> tuple:
    """(sectional curvature of the plane normal to n, Ric(f0)) for the
    constant-curvature models; n0 is the Reeb component of the unit normal."""
    if abs(n0) > 1.0 + 1e-12:
        raise ValueError("|n0| <= 1 required")
    return n0 * n0 * (kappa - 1.0) + 0.25, 0.5


def rho_ekm_sup_s(rho_s: Callable[[float], float], s_hi: float = 1e6,
                  tol: float = 1e-8) -> float:
    """sup over s > 0 of min(s, rho(s)) by bracketing the crossing s = rho(s)."""
    lo, hi = 1e-9, 1.0
    f = lambda s: rho_s(s) - s
    while f(hi) > 0:
        lo, hi = hi, hi * 2.0
        if hi > s_hi:
            return s_hi
    if f(lo) < 0:
        raise ValueError("rho(s) < s at the lower bracket already")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ot_curvature_profile(r: float) -> tuple:
    """(Ric(f0), sec(span{f2, f0})) of the oscillatory model's extension."""
    if r < 0:
        raise ValueError("r >= 0 required")
    return 0.5 * (1.0 - r**4), 0.25 * (r * r - 1.0) ** 2


def ot_ekm_majorant(s: float) -> float:
    """Per-tube-radius estimate majorant 2/s^2 used for the oscillatory model."""
    return 2.0 / (s * s)


# ---------------------------------------------------------------------------
# comparison tables


@dataclass(frozen=True)
class ComparisonRow:
    model: str
    rho_thm_b: float
    rho_thm_c: float | None
    rho_ekm_bound: float
    notes: str = ""


def _kleft_ekm_bound(kappa: float) -> float:
    # curvature data of the Riemannian extension via the normal-plane sweep
    secs = [ksect(kappa, n0)[0] for n0 in np.linspace(0.0, 1.0, 101)]
    sec_abs = max(abs(v) for v in secs)
    K_pos = max(max(secs), 1e-12)
    ric = ksect(kappa, 0.0)[1]
    return rho_ekm(EkmInputs(r_inj_R=math.inf, inj_g=math.inf, sec_abs=sec_abs,
                             K_pos=K_pos, ric_f0_min=ric))


def _kleft_rho_b(kappa: float, schwarzian_window=(0.2, 2.0), tol: float = 1e-6):
    """rho from the projective-curvature route for a constant-curvature model.

    Runs the trace pipeline, verifies S/2 + 3/(4 r^2) <= 0 on the window
    (which makes (k1, k2) = (0, 0) a valid bound with infinite comparison
    radius), and returns the injectivity radius.
    """
    from . import jacobi
    from .structures import kcontact
    model = kcontact(kappa)
    trace = jacobi.jacobi_trace(model, r_max=min(2.6, schwarzian_window[1] + 0.5))
    sample = jacobi.schwarzian_numeric(trace, schwarzian_window)
    worst = float(np.max(sample.S_reg))
    if worst > tol:
        raise RuntimeError(
            f"expected nonpositive regularized Schwarzian, got {worst!r}")
    return model.r_inj


def kleft_table(run_pipeline: bool = True) -> list:
    """Three-row comparison table for the constant-curvature models."""
    rows = []
    names = {0.0: "heisenberg", 1.0: "su2", -1.0: "sl2"}
    for kappa in (0.0, 1.0, -1.0):
        bound = curvature_bound_from_profiles([kcontact_curvatures(kappa)],
                                              (0.0, 10.0))
        A, C = bound.params
        r_inj = math.pi if kappa > 0 else math.inf
        if run_pipeline:
            rho_b = _kleft_rho_b(kappa)
        else:
            rho_b = r_inj
        rows.append(ComparisonRow(
            model=names[kappa],
            rho_thm_b=rho_b,
            rho_thm_c=min(r_inj, tau_AC(A, C)),
            rho_ekm_bound=_kleft_ekm_bound(kappa),
            notes="EKM column is an upper bound"))
    return rows


def ot_table_row(r_tight: float | None = None) -> ComparisonRow:
    """Oscillatory-model row: sharp radius versus the tube-estimate majorant."""
    if r_tight is None:
        from .structures import overtwisted
        r_tight = overtwisted().first_beta_zero()
    return ComparisonRow(model="overtwisted",
                         rho_thm_b=r_tight,
                         rho_thm_c=None,
                         rho_ekm_bound=rho_ekm_sup_s(ot_ekm_majorant),
                         notes="EKM column is an upper bound (sup_s min(s, 2/s^2))")


def _fmt(v) -> str:
    if v is None:
        return "-"
    if math.isinf(v):
        return "inf"
    return f"{v:.4f}"


def table_markdown(rows) -> str:
    lines = ["| model | rho_B | rho_C | rho_EKM |",
             "|---|---|---|---|"]
    for row in rows:
        ekm = "<= " + _fmt(row.rho_ekm_bound)
        lines.append(f"| {row.model} | {_fmt(row.rho_thm_b)} | "
                     f"{_fmt(row.rho_thm_c)} | {ekm} |")
    return "\n".join(lines) + "\n"


def table_csv(rows) -> str:
    out = ["model,rho_B,rho_C,rho_EKM_upper_bound"]
    for row in rows:
        out.append(f"{row.model},{_fmt(row.rho_thm_b)},{_fmt(row.rho_thm_c)},"
                   f"{_fmt(row.rho_ekm_bound)}")
    return "\n".join(out) + "\n"
