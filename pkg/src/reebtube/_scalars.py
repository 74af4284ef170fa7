"""Removable-singularity scalar functions used by the model cometrics.

Each helper returns (value, d/dw, d2/dw2) and switches to a truncated series
near the singular point so that evaluation stays accurate in double precision.
"""
from __future__ import annotations

import numpy as np

_SWITCH = 0.25


def halfangle_sq_over(w: float):
    """sin^2(w/2)/w = (1 - cos w)/(2w) and its first two w-derivatives."""
    if abs(w) < _SWITCH:
        v = w / 4 - w**3 / 48 + w**5 / 1440 - w**7 / 80640 + w**9 / 7257600
        d1 = 0.25 - w * w / 16 + w**4 / 288 - w**6 / 11520 + w**8 / 806400
        d2 = -w / 8 + w**3 / 72 - w**5 / 1920 + w**7 / 100800
        return v, d1, d2
    s, c = np.sin(w), np.cos(w)
    v = (1.0 - c) / (2.0 * w)
    d1 = s / (2.0 * w) - v / w
    d2 = c / (2.0 * w) - s / (2.0 * w * w) - d1 / w + v / (w * w)
    return v, d1, d2


def sinc_full(w: float):
    """sin(w)/w and its first two w-derivatives."""
    if abs(w) < _SWITCH:
        v = 1.0 - w * w / 6 + w**4 / 120 - w**6 / 5040 + w**8 / 362880
        d1 = -w / 3 + w**3 / 30 - w**5 / 840 + w**7 / 45360
        d2 = -1.0 / 3 + w * w / 10 - w**4 / 168 + w**6 / 6480
        return v, d1, d2
    s, c = np.sin(w), np.cos(w)
    v = s / w
    d1 = (c - v) / w
    d2 = (-s - 2.0 * d1) / w
    return v, d1, d2


def dexp_coefficient(s: float):
    """c(s) = (1 - phi(s))/s with phi = (sqrt(s)/2) cot(sqrt(s)/2), plus c', c''.

    Analytic on s < 4*pi^2 (negative s continues through coth). This is the
    ad^2-coefficient of the left-invariant-frame expansion in exponential
    coordinates.
    """
    if abs(s) < 0.05:
        c = 1 / 12 + s / 720 + s * s / 30240 + s**3 / 1209600 + s**4 / 47900160
        dc = 1 / 720 + s / 15120 + s * s / 403200 + s**3 / 11975040
        ddc = 1 / 15120 + s / 201600 + s * s / 3991680
        return c, dc, ddc
    u = np.sqrt(abs(s)) / 2.0
    phi = u / np.tan(u) if s > 0 else u / np.tanh(u)
    c = (1.0 - phi) / s
    num = phi - phi * phi - s / 4.0
    dphi = num / (2.0 * s)
    dnum = dphi * (1.0 - 2.0 * phi) - 0.25
    ddphi = (dnum * s - num) / (2.0 * s * s)
    dc = -dphi / s - c / s
    ddc = -ddphi / s + dphi / (s * s) - dc / s + c / (s * s)
    return c, dc, ddc
