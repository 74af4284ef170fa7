"""Contact sub-Riemannian structures on coordinate charts of R^3.

A structure is described by an oriented orthonormal frame (f0, f1, f2), with
f0 the Reeb field and f1, f2 spanning the contact planes. Normalization is
validated through the structure coefficients; nothing is ever rescaled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._cometric import (Cometric, FrameCometric, TubeCometric,
                        axisymmetric_coef, fd_radial_coef)
from ._kchart import KChart, KChartCometric
from ._numderiv import directional_derivative, jacobian_fd, hessian_fd
from ._scalars import halfangle_sq_over, sinc_full


class FrameSingular(Exception):
    """Frame matrix numerically singular at a probe point."""


class ContactViolation(Exception):
    """gamma(r)/r fails to stay positive: the form is not contact there."""


_COND_LIMIT = 1e12


@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned box; structures reject points outside their declared box."""
    lo: tuple = (-50.0, -50.0, -50.0)
    hi: tuple = (50.0, 50.0, 50.0)

    def contains(self, q) -> bool:
        return all(l <= v <= h for v, l, h in zip(q, self.lo, self.hi))

    def margin(self, q) -> float:
        """Positive inside, negative outside."""
        return min(min(v - l, h - v) for v, l, h in zip(q, self.lo, self.hi))


@dataclass
class ReebOrbitSpec:
    """A parametrized Reeb orbit with a trivializing coframe along it.

    gamma(z) is the orbit point at parameter z; coframe(z) returns the rows
    (nu1, nu2) dual to a horizontal orthonormal frame at gamma(z) and
    annihilating f0. For periodic orbits the caller must supply a coframe that
    closes up over the period.
    """
    gamma: Callable[[float], np.ndarray]
    coframe: Callable[[float], np.ndarray]
    z_range: tuple = (-1.0, 1.0)
    period: float | None = None
    label: str = ""

    def covector(self, z: float, theta: float) -> np.ndarray:
        nu = self.coframe(z)
        return math.cos(theta) * nu[0] + math.sin(theta) * nu[1]


class StructureSpec:
    """Base class: frame access, cometric, domain, and model metadata."""

    name: str = "structure"
    kind: str = "frame"
    h_fd: float = 1e-5
    r_inj: float | None = None        # analytic value when the model provides one
    domain: DomainBox = DomainBox()

    def frame(self, q: np.ndarray) -> np.ndarray:
        """3x3 matrix with column j = f_j(q), j = 0 the Reeb field."""
        raise NotImplementedError

    def frame_batch(self, qs: np.ndarray) -> np.ndarray:
        return np.stack([self.frame(q) for q in np.atleast_2d(qs)])

    def frame_jacobian(self, q: np.ndarray) -> np.ndarray:
        """J[j][a, k] = d (f_j)_a / d q_k; finite differences by default."""
        J = jacobian_fd(lambda p: self.frame(p).T.ravel(), q, self.h_fd)
        return np.stack([J[3 * j:3 * j + 3] for j in range(3)])

    @property
    def cometric(self) -> Cometric:
        raise NotImplementedError

    def contains(self, q) -> bool:
        return self.domain.contains(q)

    def domain_margin(self, q) -> float:
        """Continuous function, positive inside the valid chart region."""
        return self.domain.margin(q)

    def default_orbit(self) -> ReebOrbitSpec:
        raise NotImplementedError

    def coframe_from_frame(self, q: np.ndarray) -> np.ndarray:
        """Rows (nu0, nu1, nu2) dual to the frame columns at q."""
        F = self.frame(q)
        if np.linalg.cond(F) > _COND_LIMIT:
            raise FrameSingular(f"frame matrix ill-conditioned at {q}")
        return np.linalg.inv(F)

    def reeb_form_batch(self, qs: np.ndarray) -> np.ndarray:
        """omega (= nu0) row at each point of an (n, 3) array."""
        F = self.frame_batch(qs)
        rhs = np.zeros((F.shape[0], 3, 1))
        rhs[:, 0, 0] = 1.0
        return np.linalg.solve(np.transpose(F, (0, 2, 1)), rhs)[:, :, 0]


# ---------------------------------------------------------------------------
# frame-defined structures


class FrameStructure(StructureSpec):
    """Structure given by coordinate components of f0, f1, f2.

    Analytic Jacobians (and Hessians, used by the variational flow) may be
    supplied; otherwise central finite differences with step h_fd are used.
    """

    kind = "frame"

    def __init__(self, name, f0, f1, f2, jacobians=None, hessians=None,
                 domain: DomainBox | None = None, h_fd: float = 1e-5,
                 r_inj: float | None = None, orbit_factory=None):
        self.name = name
        self._fields = (f0, f1, f2)
        self._jacobians = jacobians    # tuple of callables q -> (3,3), frame order
        self._hessians = hessians
        self.domain = domain or DomainBox()
        self.h_fd = h_fd
        self.r_inj = r_inj
        self._orbit_factory = orbit_factory
        self._cometric = FrameCometric(
            self.frame,
            frame_jac=(lambda q: self.frame_jacobian(q)) if jacobians else None,
            frame_hess=(lambda q: self._hess_all(q)) if hessians else None,
            h_fd=h_fd)

    def frame(self, q):
        q = np.asarray(q, dtype=float)
        return np.column_stack([f(q) for f in self._fields])

    def frame_jacobian(self, q):
        if self._jacobians is not None:
            return np.stack([J(np.asarray(q, dtype=float)) for J in self._jacobians])
        return super().frame_jacobian(q)

    def _hess_all(self, q):
        return np.stack([H(np.asarray(q, dtype=float)) for H in self._hessians])

    @property
    def cometric(self):
        return self._cometric

    def default_orbit(self):
        if self._orbit_factory is None:
            raise ValueError(f"structure {self.name!r} has no built-in Reeb orbit; "
                             "supply a ReebOrbitSpec")
        return self._orbit_factory()


# ---------------------------------------------------------------------------
# radial models


class RadialProfile:
    """One-dimensional radial profile with derivatives up to third order."""

    def __call__(self, r: float) -> float:
        raise NotImplementedError

    def deriv(self, r: float, n: int = 1) -> float:
        raise NotImplementedError


class PolyProfile(RadialProfile):
    def __init__(self, coeffs: Sequence[float]):
        self.coeffs = np.asarray(coeffs, dtype=float)  # c0 + c1 r + c2 r^2 + ...

    def __call__(self, r):
        return float(np.polynomial.polynomial.polyval(r, self.coeffs))

    def deriv(self, r, n=1):
        d = np.polynomial.polynomial.polyder(self.coeffs, n)
        return float(np.polynomial.polynomial.polyval(r, d))


class TrigProfile(RadialProfile):
    """a * cos(omega * r^2 + phase): covers the oscillatory model profiles."""

    def __init__(self, a: float = 1.0, omega: float = 0.5, phase: float = 0.0):
        self.a, self.omega, self.phase = a, omega, phase

    def _arg(self, r):
        return self.omega * r * r + self.phase

    def __call__(self, r):
        return self.a * math.cos(self._arg(r))

    def deriv(self, r, n=1):
        a, om = self.a, self.omega
        u = self._arg(r)
        s, c = math.sin(u), math.cos(u)
        if n == 1:
            return -2 * a * om * r * s
        if n == 2:
            return -2 * a * om * (s + 2 * om * r * r * c)
        if n == 3:
            return -4 * a * om * om * r * (3 * c - 2 * om * r * r * s)
        raise ValueError(n)


class TableProfile(RadialProfile):
    """Cubic-spline interpolation of tabulated (r, value) pairs."""

    def __init__(self, r: Sequence[float], values: Sequence[float]):
        from scipy.interpolate import CubicSpline
        self._sp = CubicSpline(np.asarray(r, float), np.asarray(values, float))

    def __call__(self, r):
        return float(self._sp(r))

    def deriv(self, r, n=1):
        return float(self._sp(r, n))


class RadialModel(StructureSpec):
    """omega = alpha(r) dz + beta(r) dtheta with radial profiles.

    Expects the normalized axis jets alpha(0) = 1 and beta''(0) = 1 (i.e.
    beta/r^2 -> 1/2), which any structure smooth across the axis satisfies.
    The tube map is the identity, so r_inj = +infinity.
    """

    kind = "radial"

    def __init__(self, name, alpha: RadialProfile, beta: RadialProfile,
                 r_max: float = 10.0, coefficient_triples=None):
        self.name = name
        self.alpha, self.beta = alpha, beta
        self.r_max = float(r_max)
        self.r_inj = math.inf
        self.domain = DomainBox((-r_max, -r_max, -50.0), (r_max, r_max, 50.0))
        self._validate()
        if coefficient_triples is None:
            coefficient_triples = tuple(fd_radial_coef(f) for f in
                                        (self._P, self._Q, self._R))
        self._cometric = TubeCometric(coefficient_triples)

    # cometric coefficients as functions of w = r^2
    def _gamma(self, r):
        return self.alpha(r) * self.beta.deriv(r) - self.beta(r) * self.alpha.deriv(r)

    def _P(self, w):
        if w <= 0.0:
            return 0.0
        r = math.sqrt(w)
        g = self._gamma(r)
        return self.alpha(r) ** 2 / (g * g) - 1.0 / w

    def _Q(self, w):
        if w <= 0.0:
            return 0.0
        r = math.sqrt(w)
        return (self.beta(r) / self._gamma(r)) ** 2

    def _R(self, w):
        if w <= 0.0:
            r = 1e-5
        else:
            r = math.sqrt(w)
        g = self._gamma(r)
        return -2.0 * self.alpha(r) * self.beta(r) / (g * g)

    def _validate(self):
        a0 = self.alpha(0.0)
        if abs(a0) < 1e-12:
            raise ContactViolation("alpha(0) must not vanish")
        if abs(self.beta(0.0)) > 1e-10:
            raise ContactViolation("beta(0) must vanish")
        rs = np.linspace(1e-4, self.r_max * (1 - 1e-9), 400)
        gam_over_r = np.array([self._gamma(r) / r for r in rs])
        if np.any(gam_over_r <= 0.0):
            bad = rs[np.argmax(gam_over_r <= 0.0)]
            raise ContactViolation(f"gamma(r)/r <= 0 near r = {bad:.6g}")
        if abs(a0 - 1.0) > 1e-8 or abs(self.beta(1e-3) / 1e-6 - 0.5) > 1e-3:
            raise ContactViolation(
                "radial model must be normalized at the axis: alpha(0) = 1 "
                "and beta(r)/r^2 -> 1/2")

    def frame(self, q):
        q = np.asarray(q, dtype=float)
        x, y = q[0], q[1]
        w = x * x + y * y
        r = math.sqrt(w)
        if r < 1e-9:
            raise FrameSingular("radial frame is singular on the axis")
        a, b = self.alpha(r), self.beta(r)
        da, db = self.alpha.deriv(r), self.beta.deriv(r)
        g = a * db - b * da
        f1 = np.array([x / r, y / r, 0.0])
        f2 = np.array([-y * a / g, x * a / g, -b / g])
        f0 = np.array([y * da / g, -x * da / g, db / g])
        return np.column_stack([f0, f1, f2])

    def frame_batch(self, qs):
        qs = np.atleast_2d(qs)
        return np.stack([self.frame(q) for q in qs])

    def domain_margin(self, q):
        w = q[0] * q[0] + q[1] * q[1]
        return min(self.domain.margin(q), self.r_max ** 2 - w)

    def contains(self, q):
        return self.domain_margin(q) > 0.0

    def reeb_form_batch(self, qs):
        # omega = alpha dz + (beta/r^2)(x dy - y dx); smooth across the axis
        qs = np.atleast_2d(qs)
        out = np.empty((qs.shape[0], 3))
        for i, q in enumerate(qs):
            r = math.hypot(q[0], q[1])
            rr = max(r, 1e-5)
            b_over = self.beta(rr) / (rr * rr)
            out[i] = (-q[1] * b_over, q[0] * b_over, self.alpha(r))
        return out

    @property
    def cometric(self):
        return self._cometric

    def first_beta_zero(self) -> float:
        """inf{r > 0 : beta(r) = 0}, the model's closed-form tightness radius."""
        from scipy.optimize import brentq
        rs = np.linspace(1e-6, self.r_max, 4000)
        vals = np.array([self.beta(r) for r in rs])
        sign_change = np.where(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
        if len(sign_change) == 0:
            return math.inf
        i = sign_change[0]
        return brentq(self.beta, rs[i], rs[i + 1], xtol=1e-12)

    def default_orbit(self):
        nu = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        return ReebOrbitSpec(
            gamma=lambda z: np.array([0.0, 0.0, z]),
            coframe=lambda z: nu,
            z_range=(-1.0, 1.0),
            label=f"{self.name}:axis")


# ---------------------------------------------------------------------------
# constant-curvature (K-contact) models


class KContactModel(StructureSpec):
    """Left-invariant model with Reeb-quotient curvature kappa, in exponential
    coordinates of the corresponding group.

    For kappa > 0 the chart degenerates where s = kappa(x^2+y^2) + kappa^2 z^2
    reaches (2 pi)^2; the built-in Reeb orbit is based at (0, 0, -pi/kappa) so
    that unit geodesics stay on the s = pi^2 sphere, uniformly inside.
    """

    kind = "kcontact"

    def __init__(self, kappa: float):
        self.kappa = float(kappa)
        self.name = f"kcontact(kappa={kappa:g})"
        self.chart = KChart(self.kappa)
        self._cometric = KChartCometric(self.chart)
        self.r_inj = math.pi / math.sqrt(kappa) if kappa > 0 else math.inf
        self.domain = DomainBox((-40.0, -40.0, -40.0), (40.0, 40.0, 40.0))

    def frame(self, q):
        return self.chart.frame(q)

    def frame_batch(self, qs):
        return self.chart.frame_batch(qs)

    @property
    def cometric(self):
        return self._cometric

    def contains(self, q):
        if not self.domain.contains(q):
            return False
        if self.kappa > 0:
            return self.chart.s(q) < 0.985 * (2 * math.pi) ** 2
        return True

    def domain_margin(self, q):
        m = self.domain.margin(q)
        if self.kappa > 0:
            m = min(m, 0.985 * (2 * math.pi) ** 2 - self.chart.s(q))
        return m

    def _base(self) -> float:
        return -math.pi / self.kappa if self.kappa > 0 else 0.0

    def default_orbit(self):
        z0 = self._base()

        def gamma(z):
            return np.array([0.0, 0.0, z0 + z])

        def coframe(z):
            nu = np.linalg.inv(self.frame(gamma(z)))
            return nu[1:3]

        return ReebOrbitSpec(gamma=gamma, coframe=coframe,
                             z_range=(-0.5, 0.5), label=self.name)


# ---------------------------------------------------------------------------
# built-in structures


def heisenberg() -> FrameStructure:
    """Flat model: f1 = dx + (y/2) dz-dual, f2 = dy - (x/2) dz-dual, f0 = dz."""
    def f0(q):
        return np.array([0.0, 0.0, 1.0])

    def f1(q):
        return np.array([1.0, 0.0, q[1] / 2.0])

    def f2(q):
        return np.array([0.0, 1.0, -q[0] / 2.0])

    zero = np.zeros((3, 3))
    j1 = np.zeros((3, 3)); j1[2, 1] = 0.5
    j2 = np.zeros((3, 3)); j2[2, 0] = -0.5
    jacobians = (lambda q: zero, lambda q: j1.copy(), lambda q: j2.copy())
    zero_h = np.zeros((3, 3, 3))
    hessians = (lambda q: zero_h, lambda q: zero_h, lambda q: zero_h)

    def orbit_factory():
        nu = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        return ReebOrbitSpec(gamma=lambda z: np.array([0.0, 0.0, z]),
                             coframe=lambda z: nu, label="heisenberg:axis")

    s = FrameStructure("heisenberg", f0, f1, f2, jacobians=jacobians,
                       hessians=hessians, r_inj=math.inf,
                       orbit_factory=orbit_factory)
    return s


def _ot_alpha():
    return TrigProfile(a=1.0, omega=0.5, phase=0.0)


def _ot_beta():
    return TrigProfile(a=1.0, omega=0.5, phase=-math.pi / 2.0)  # sin(r^2/2)


def overtwisted(r_max: float = 6.0) -> RadialModel:
    """Oscillatory radial model: omega = cos(r^2/2) dz + sin(r^2/2) dtheta."""
    def P(w):
        v, d1, d2 = halfangle_sq_over(w)
        return -v, -d1, -d2

    def R(w):
        v, d1, d2 = sinc_full(w)
        return -v, -d1, -d2

    coefs = (axisymmetric_coef(P), axisymmetric_coef(halfangle_sq_over),
             axisymmetric_coef(R))
    return RadialModel("overtwisted", _ot_alpha(), _ot_beta(), r_max=r_max,
                       coefficient_triples=coefs)


def standard_radial(r_max: float = 10.0) -> RadialModel:
    """alpha = 1, beta = r^2/2: the flat model in radial form."""
    def P(w):
        return 0.0, 0.0, 0.0

    def Q(w):
        return w / 4.0, 0.25, 0.0

    def R(w):
        return -1.0, 0.0, 0.0

    coefs = tuple(axisymmetric_coef(f) for f in (P, Q, R))
    return RadialModel("standard", PolyProfile([1.0]), PolyProfile([0.0, 0.0, 0.5]),
                       r_max=r_max, coefficient_triples=coefs)


def kcontact(kappa: float) -> KContactModel:
    return KContactModel(kappa)


class PerturbedModel(StructureSpec):
    """Angular perturbation of the oscillatory model (contact angle
    f = r^2/2 + eps r^5 cos(theta)/(1+r^2)); tube map is the identity."""

    kind = "perturbed"

    def __init__(self, eps: float, r_max: float = 4.0):
        from ._perturbed import make_coefs
        self.eps = float(eps)
        self.name = f"perturbed(eps={eps:g})"
        self.r_max = float(r_max)
        self.r_inj = math.inf
        self.domain = DomainBox((-r_max, -r_max, -50.0), (r_max, r_max, 50.0))
        self._cometric = TubeCometric(make_coefs(self.eps))

    def _angle(self, x, y):
        w = x * x + y * y
        return w / 2.0 + self.eps * x * w * w / (1.0 + w)

    def frame(self, q):
        q = np.asarray(q, dtype=float)
        x, y = q[0], q[1]
        w = x * x + y * y
        r = math.sqrt(w)
        if r < 1e-9:
            raise FrameSingular("perturbed frame is singular on the axis")
        e = self.eps
        f = self._angle(x, y)
        g = w * w / (1.0 + w)
        dg = (2 * w * (1 + w) - w * w) / (1 + w) ** 2   # d(w^2/(1+w))/dw
        fx = x + e * (g + 2 * x * x * dg)
        fy = y + e * 2 * x * y * dg
        f_r = (x * fx + y * fy) / r
        f_th = -e * y * g
        s, c = math.sin(f), math.cos(f)
        f1 = np.array([x / r, y / r, 0.0])
        f2 = (c * np.array([-y, x, 0.0]) - s * np.array([0.0, 0.0, 1.0])) / f_r
        f0 = (-(f_th / f_r) * s) * f1 + s * np.array([-y, x, 0.0])
        f0 = f0 + np.array([0.0, 0.0, c])
        return np.column_stack([f0, f1, f2])

    def domain_margin(self, q):
        w = q[0] * q[0] + q[1] * q[1]
        return min(self.domain.margin(q), self.r_max ** 2 - w)

    def contains(self, q):
        return self.domain_margin(q) > 0.0

    def reeb_form_batch(self, qs):
        # omega = sin(f) dtheta + cos(f) dz with sin(f)/r^2 evaluated stably
        qs = np.atleast_2d(qs)
        x, y = qs[:, 0], qs[:, 1]
        w = x * x + y * y
        f = w / 2.0 + self.eps * x * w * w / (1.0 + w)
        f_over_w = 0.5 + self.eps * x * w / (1.0 + w)
        s_over_w = f_over_w * np.sinc(f / np.pi)
        return np.column_stack([-y * s_over_w, x * s_over_w, np.cos(f)])

    @property
    def cometric(self):
        return self._cometric

    def default_orbit(self):
        nu = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        return ReebOrbitSpec(gamma=lambda z: np.array([0.0, 0.0, z]),
                             coframe=lambda z: nu, label=self.name)


def perturbed(eps: float, r_max: float = 4.0) -> PerturbedModel:
    return PerturbedModel(eps, r_max=r_max)


BUILTIN_FACTORIES = {
    "heisenberg": heisenberg,
    "overtwisted": overtwisted,
    "standard": standard_radial,
}


# ---------------------------------------------------------------------------
# operations


def structure_coefficients(s: StructureSpec, p) -> np.ndarray:
    """c[i, j, k] = frame expansion of [f_i, f_j]; indices 0..2 with 0 = Reeb.

    Uses analytic frame Jacobians when the structure supplies them, else
    4th-order central finite differences with step h_fd (Richardson once).
    """
    p = np.asarray(p, dtype=float)
    F = s.frame(p)
    if np.linalg.cond(F) > _COND_LIMIT:
        raise FrameSingular(f"frame matrix ill-conditioned at {p}")
    J = s.frame_jacobian(p)
    c = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(i + 1, 3):
            bracket = J[j] @ F[:, i] - J[i] @ F[:, j]
            coef = np.linalg.solve(F, bracket)
            c[i, j] = coef
            c[j, i] = -coef
    return c


@dataclass
class NormalizationReport:
    """Worst-probe violations of the normalized-frame identities."""
    reeb_pairing: float          # |c_{12}^0 + 1|
    reeb_closed: float           # max(|c_{10}^0|, |c_{20}^0|)
    traceless: float             # |c_{01}^1 + c_{02}^2|
    worst_probe: np.ndarray = field(default_factory=lambda: np.zeros(3))

    @property
    def max_violation(self) -> float:
        return max(self.reeb_pairing, self.reeb_closed, self.traceless)

    def passed(self, tol: float = 1e-8) -> bool:
        return self.max_violation <= tol


def validate_normalization(s: StructureSpec, probes) -> NormalizationReport:
    """Check c_{12}^0 = -1, c_{10}^0 = c_{20}^0 = 0, c_{01}^1 + c_{02}^2 = 0."""
    best = NormalizationReport(0.0, 0.0, 0.0)
    for p in probes:
        p = np.asarray(p, dtype=float)
        if not s.contains(p):
            raise ValueError(f"probe {p} outside the declared domain")
        c = structure_coefficients(s, p)
        v1 = abs(c[1, 2, 0] + 1.0)
        v2 = max(abs(c[1, 0, 0]), abs(c[2, 0, 0]))
        v3 = abs(c[0, 1, 1] + c[0, 2, 2])
        if max(v1, v2, v3) >= best.max_violation:
            best = NormalizationReport(v1, v2, v3, p)
    return best


def invariants_chi_kappa(s: StructureSpec, p, h_dir: float = 1e-3):
    """The metric invariants (chi, kappa) at p.

    chi = sqrt((c01^1)^2 + (c01^2 + c02^1)^2 / 4); kappa combines the
    derivatives of c12^1, c12^2 along f1, f2 with the quadratic terms.
    """
    p = np.asarray(p, dtype=float)
    c = structure_coefficients(s, p)
    chi = math.sqrt(c[0, 1, 1] ** 2 + 0.25 * (c[0, 1, 2] + c[0, 2, 1]) ** 2)
    F = s.frame(p)

    def c12(k):
        return lambda q: structure_coefficients(s, q)[1, 2, k]

    d1_c122 = directional_derivative(lambda q: np.array([c12(2)(q)]), p,
                                     F[:, 1], h_dir)[0]
    d2_c121 = directional_derivative(lambda q: np.array([c12(1)(q)]), p,
                                     F[:, 2], h_dir)[0]
    kappa = (d1_c122 - d2_c121 - c[1, 2, 1] ** 2 - c[1, 2, 2] ** 2
             + 0.5 * (c[0, 2, 1] - c[0, 1, 2]))
    return chi, kappa


def radial_to_frame(m: RadialModel) -> FrameStructure:
    """Cylindrical frame (f0, N, JN) of a radial model as a FrameStructure."""
    rs = np.linspace(1e-3, m.r_max * (1 - 1e-9), 200)
    for r in rs:
        if m._gamma(r) / r <= 0.0:
            raise ContactViolation(f"gamma(r)/r <= 0 at r = {r:.6g}")

    out = FrameStructure(
        f"{m.name}:frame",
        f0=lambda q: m.frame(q)[:, 0],
        f1=lambda q: m.frame(q)[:, 1],
        f2=lambda q: m.frame(q)[:, 2],
        domain=m.domain,
        r_inj=m.r_inj,
        orbit_factory=m.default_orbit)
    # share the smooth cometric so the flow avoids the axis singularity
    out._cometric = m.cometric
    return out


def kcontact_invariant_probe_frame(model: KContactModel, q) -> np.ndarray:
    """The model frame at q; satisfies the constant-curvature bracket table."""
    return model.frame(q)
