"""Cometric coefficients for the angular-perturbation model.

The model's contact angle along a ray at angle theta is
    f(r) = r^2/2 + eps r^5 cos(theta)/(1 + r^2),
i.e. f = w/2 + eps*x*g(w) with g = w^2/(1+w) in Cartesian coordinates. The
tube-cometric coefficients are

    P = -(sin^2 f + 2u + u^2) / (w (1+u)^2)      (p_theta^2 term)
    Q =  sin^2 f / (w (1+u)^2)                    (p_z^2 term)
    R = -sin(2f) / (w (1+u)^2)                    (p_theta p_z term)

with u = eps*x*m(w), m = w(5+3w)/(1+w)^2, so that the radial slope is
f_r = r(1+u). All three are analytic across the axis; evaluation uses exact
second-order forward-mode derivatives in (x, w), with the degree-2 Taylor jet
at the axis taking over for w below 1e-6 (where the raw quotients are 0/0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

_W_SWITCH = 1e-6


@dataclass(frozen=True)
class _V2:
    """Value with exact first and second partials in (x, w)."""
    v: float
    gx: float = 0.0
    gw: float = 0.0
    hxx: float = 0.0
    hxw: float = 0.0
    hww: float = 0.0

    def __add__(self, o):
        o = _lift(o)
        return _V2(self.v + o.v, self.gx + o.gx, self.gw + o.gw,
                   self.hxx + o.hxx, self.hxw + o.hxw, self.hww + o.hww)

    __radd__ = __add__

    def __neg__(self):
        return _V2(-self.v, -self.gx, -self.gw, -self.hxx, -self.hxw, -self.hww)

    def __sub__(self, o):
        return self + (-_lift(o))

    def __rsub__(self, o):
        return _lift(o) + (-self)

    def __mul__(self, o):
        o = _lift(o)
        a, b = self, o
        return _V2(a.v * b.v,
                   a.gx * b.v + a.v * b.gx,
                   a.gw * b.v + a.v * b.gw,
                   a.hxx * b.v + 2 * a.gx * b.gx + a.v * b.hxx,
                   a.hxw * b.v + a.gx * b.gw + a.gw * b.gx + a.v * b.hxw,
                   a.hww * b.v + 2 * a.gw * b.gw + a.v * b.hww)

    __rmul__ = __mul__

    def __truediv__(self, o):
        return self * _lift(o)._inv()

    def __rtruediv__(self, o):
        return _lift(o) * self._inv()

    def _inv(self):
        iv = 1.0 / self.v
        return self._chain(iv, -iv * iv, 2.0 * iv * iv * iv)

    def _chain(self, f, df, ddf):
        """Compose with a scalar function given (f, f', f'') at self.v."""
        return _V2(f,
                   df * self.gx,
                   df * self.gw,
                   df * self.hxx + ddf * self.gx * self.gx,
                   df * self.hxw + ddf * self.gx * self.gw,
                   df * self.hww + ddf * self.gw * self.gw)

    def sin(self):
        s, c = math.sin(self.v), math.cos(self.v)
        return self._chain(s, c, -s)


def _lift(v):
    return v if isinstance(v, _V2) else _V2(float(v))


def _coefficients_ad(x: float, w: float, eps: float):
    X = _V2(x, gx=1.0)
    W = _V2(w, gw=1.0)
    g = W * W / (1.0 + W)
    m = W * (5.0 + 3.0 * W) / ((1.0 + W) * (1.0 + W))
    u = eps * X * m
    f = 0.5 * W + eps * X * g
    sf = f.sin()
    s2f = (2.0 * f).sin()
    denom = W * (1.0 + u) * (1.0 + u)
    P = -(sf * sf + 2.0 * u + u * u) / denom
    Q = sf * sf / denom
    R = -s2f / denom
    return P, Q, R


def _coefficients_jet(x: float, w: float, eps: float):
    """Degree-2 Taylor jets at the axis (error O(total degree 3))."""
    e = eps
    P = _V2(-10 * e * x - w / 4 + 14 * e * x * w,
            gx=-10 * e + 14 * e * w, gw=-0.25 + 14 * e * x,
            hxx=0.0, hxw=14 * e, hww=0.0)
    Q = _V2(w / 4 - 1.5 * e * x * w * w,
            gx=-1.5 * e * w * w, gw=0.25 - 3 * e * x * w,
            hxx=0.0, hxw=-3 * e * w, hww=-3 * e * x)
    R = _V2(-1.0 + 8 * e * x * w + w * w / 6,
            gx=8 * e * w, gw=8 * e * x + w / 3,
            hxx=0.0, hxw=8 * e, hww=1.0 / 3.0)
    return P, Q, R


def make_coefs(eps: float):
    """(P, Q, R) coefficient callables for TubeCometric at a fixed eps."""
    def pick(i):
        def coef(x: float, w: float):
            if w < _W_SWITCH:
                c = _coefficients_jet(x, w, eps)[i]
            else:
                c = _coefficients_ad(x, w, eps)[i]
            return c.v, (c.gx, c.gw), (c.hxx, c.hxw, c.hww)
        return coef

    return pick(0), pick(1), pick(2)
