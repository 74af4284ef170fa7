"""Finite-difference helpers shared by the geometry and trace modules."""
from __future__ import annotations

from typing import Callable

import numpy as np

# 4th-order central first-derivative weights at offsets [-2,-1,0,1,2]
_C1_4 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def directional_derivative(f: Callable[[np.ndarray], np.ndarray],
                           q: np.ndarray, v: np.ndarray,
                           h: float = 1e-5) -> np.ndarray:
    """d/dt f(q + t v) at t=0, 4th-order central, Richardson-extrapolated once."""
    def d(step):
        pts = [f(q + k * step * v) for k in (-2, -1, 1, 2)]
        return (pts[0] - 8.0 * pts[1] + 8.0 * pts[2] - pts[3]) / (12.0 * step)

    d1, d2 = d(h), d(h / 2.0)
    return (16.0 * d2 - d1) / 15.0


def jacobian_fd(f: Callable[[np.ndarray], np.ndarray], q: np.ndarray,
                h: float = 1e-5) -> np.ndarray:
    """J[a, k] = d f_a / d q_k by 4th-order central differences with Richardson."""
    cols = [directional_derivative(f, q, e, h) for e in np.eye(len(q))]
    return np.stack(cols, axis=-1)


def hessian_fd(f: Callable[[np.ndarray], np.ndarray], q: np.ndarray,
               h: float = 1e-4) -> np.ndarray:
    """H[a, k, l] = d^2 f_a / d q_k d q_l, symmetrized central differences."""
    n = len(q)
    fq = np.asarray(f(q), dtype=float)
    H = np.zeros(fq.shape + (n, n))
    eye = np.eye(n)
    for k in range(n):
        for l in range(k, n):
            if k == l:
                val = (-f(q + 2 * h * eye[k]) + 16 * f(q + h * eye[k])
                       - 30 * fq + 16 * f(q - h * eye[k])
                       - f(q - 2 * h * eye[k])) / (12 * h * h)
            else:
                val = (f(q + h * (eye[k] + eye[l])) - f(q + h * (eye[k] - eye[l]))
                       - f(q - h * (eye[k] - eye[l])) + f(q - h * (eye[k] + eye[l]))
                       ) / (4 * h * h)
            H[..., k, l] = val
            H[..., l, k] = val
    return H


def uniform_segment_derivatives(values: np.ndarray, h: float, order: int):
    """Derivative of given order on a uniform grid, 6th-order interior stencils.

    Falls back to lower-order one-sided stencils near the ends. Intended for
    smooth data (dense ODE output), not noisy samples.
    """
    n = len(values)
    if n < 8:
        raise ValueError("need at least 8 samples per uniform segment")
    out = np.empty_like(values)
    # interior: centered 7-point stencils
    w = _centered_weights(order)
    half = len(w) // 2
    conv = np.convolve(values, w[::-1], mode="valid") / h ** order
    out[half:n - half] = conv
    # ends: one-sided from an 8-point polynomial fit
    for i in range(half):
        out[i] = _onesided(values[:8], h, order, i)
        out[n - 1 - i] = (-1) ** order * _onesided(values[::-1][:8], h, order, i)
    return out


def _centered_weights(order: int) -> np.ndarray:
    if order == 1:
        return np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
    if order == 2:
        return np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0
    if order == 3:
        return np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0
    raise ValueError(order)


def _onesided(vals8: np.ndarray, h: float, order: int, at: int) -> float:
    xs = np.arange(8.0) * h
    coef = np.polynomial.polynomial.polyfit(xs, vals8, 7)
    dcoef = np.polynomial.polynomial.polyder(coef, order)
    return np.polynomial.polynomial.polyval(at * h, dcoef)
