"""Cometric backends for the geodesic flow.

Every structure exposes the cometric G(q) of its horizontal metric (so that
H = p.G(q).p / 2) together with first and second spatial derivatives, which is
exactly what the Hamiltonian flow and its linearization consume.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ._numderiv import jacobian_fd, hessian_fd

_DIAG_H = np.diag([1.0, 1.0, 0.0])
_E3 = np.eye(3)
# a(q) = (-y, x, 0); p_theta = a . p
_DA = [np.array([0.0, 1.0, 0.0]), np.array([-1.0, 0.0, 0.0]), np.zeros(3)]


class Cometric:
    """Interface: G(q) 3x3, dG(q) (3,3,3) indexed [k,i,j], d2G(q) (3,3,3,3)."""

    def G(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dG(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def d2G(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def pair(self, q):
        """(G, dG), the data the plain geodesic flow needs."""
        return self.G(q), self.dG(q)

    def all(self, q):
        return self.G(q), self.dG(q), self.d2G(q)


class TubeCometric(Cometric):
    """Cometric of the form diag(1,1,0) + P aa^T + Q e3 e3^T + (R/2)(a e3^T + e3 a^T).

    a = (-y, x, 0). The coefficients are functions of (x, w) with w = x^2 + y^2;
    axisymmetric models simply ignore x. Coefficient callables return
    (value, (c_x, c_w), (c_xx, c_xw, c_ww)).
    """

    def __init__(self, coefs: Sequence[Callable[[float, float], tuple]]):
        self._coefs = list(coefs)  # (P, Q, R)

    @staticmethod
    def _tensors(q):
        a = np.array([-q[1], q[0], 0.0])
        T1 = np.outer(a, a)
        T2 = np.outer(_E3[2], _E3[2])
        T3 = 0.5 * (np.outer(a, _E3[2]) + np.outer(_E3[2], a))
        return a, (T1, T2, T3)

    @staticmethod
    def _dT(a):
        dT1 = [np.outer(_DA[k], a) + np.outer(a, _DA[k]) for k in range(3)]
        dT3 = [0.5 * (np.outer(_DA[k], _E3[2]) + np.outer(_E3[2], _DA[k]))
               for k in range(3)]
        return dT1, dT3

    def _eval(self, q, order):
        x, w = q[0], q[0] * q[0] + q[1] * q[1]
        vals = [c(x, w) for c in self._coefs]
        a, Ts = self._tensors(q)
        wk = np.array([2.0 * q[0], 2.0 * q[1], 0.0])
        # gradient of the coefficient in chart coordinates
        def grad(c):
            cx, cw = c[1]
            g = cw * wk
            g[0] += cx
            return g
        G = _DIAG_H + sum(c[0] * T for c, T in zip(vals, Ts))
        if order == 0:
            return G
        dT1, dT3 = self._dT(a)
        dTs = [dT1, [np.zeros((3, 3))] * 3, dT3]
        grads = [grad(c) for c in vals]
        dG = np.zeros((3, 3, 3))
        for k in range(3):
            for c, g, T, dT in zip(vals, grads, Ts, dTs):
                dG[k] += g[k] * T + c[0] * dT[k]
        if order == 1:
            return G, dG
        d2G = np.zeros((3, 3, 3, 3))
        for ci, (c, g, T, dT) in enumerate(zip(vals, grads, Ts, dTs)):
            cxx, cxw, cww = c[2]
            cw = c[1][1]
            for k in range(3):
                for l in range(k, 3):
                    # second derivative of the coefficient c(x, w(q))
                    h = cww * wk[k] * wk[l]
                    if k == 0:
                        h += cxw * wk[l]
                    if l == 0:
                        h += cxw * wk[k]
                    if k == 0 and l == 0:
                        h += cxx
                    if k == l and k < 2:
                        h += 2.0 * cw
                    M = h * T + g[k] * dT[l] + g[l] * dT[k]
                    if ci == 0:  # a a^T has nonzero second derivative
                        M = M + c[0] * (np.outer(_DA[k], _DA[l])
                                        + np.outer(_DA[l], _DA[k]))
                    d2G[k, l] += M
                    if l != k:
                        d2G[l, k] += M
        return G, dG, d2G

    def G(self, q):
        return self._eval(q, 0)

    def dG(self, q):
        return self._eval(q, 1)[1]

    def d2G(self, q):
        return self._eval(q, 2)[2]

    def pair(self, q):
        return self._eval(q, 1)

    def all(self, q):
        return self._eval(q, 2)


def axisymmetric_coef(fun_triple: Callable[[float], tuple]):
    """Adapt a w-only coefficient (value, d/dw, d2/dw2) to the (x, w) interface."""
    def coef(x: float, w: float):
        v, d1, d2 = fun_triple(w)
        return v, (0.0, d1), (0.0, 0.0, d2)
    return coef


def fd_radial_coef(fun: Callable[[float], float], h: float = 2e-3):
    """Numeric (value, d/dw, d2/dw2) for a coefficient given only as w -> value.

    Stencil nodes are kept at w >= 0.2 h: the raw coefficient formulas have a
    removable 0/0 at the axis, so the value there comes from extrapolation.
    """
    def coef(x: float, w: float):
        step = h * (1.0 + w)
        lo = 0.2 * step
        shift = max(0.0, (lo - (w - 2.0 * step)) / step)
        nodes = w + (np.arange(-2.0, 3.0) + shift) * step
        ys = np.array([fun(n) for n in nodes])
        V = np.vander(nodes - w, 5, increasing=True)
        c = np.linalg.solve(V, ys)
        return c[0], (0.0, c[1]), (0.0, 0.0, 2.0 * c[2])
    return coef


class FrameCometric(Cometric):
    """G = f1 f1^T + f2 f2^T from frame component callables.

    frame(q) returns a 3x3 matrix with column j = f_j (j = 0 is the Reeb
    field). Jacobian/Hessian callables are optional; finite differences are
    used when absent, which limits variational accuracy to ~1e-6.
    """

    def __init__(self, frame, frame_jac=None, frame_hess=None, h_fd: float = 1e-5):
        self._frame = frame
        self._jac = frame_jac
        self._hess = frame_hess
        self._h = h_fd

    def _P(self, q):
        return self._frame(q)[:, 1:3]

    def _dP(self, q):
        if self._jac is not None:
            J = self._jac(q)  # (3,3,3): J[j][a,k] per frame column j
            return [J[1], J[2]]
        J = jacobian_fd(lambda p: self._frame(p)[:, 1:3].T.ravel(), q, self._h)
        return [J[0:3], J[3:6]]  # rows of the stacked (6,3) Jacobian

    def _d2P(self, q):
        if self._hess is not None:
            H = self._hess(q)
            return [H[j] for j in (1, 2)]
        H = hessian_fd(lambda p: np.stack([self._frame(p)[:, j] for j in (1, 2)]),
                       q, max(self._h, 1e-4))
        return [H[0], H[1]]

    def G(self, q):
        P = self._P(q)
        return P @ P.T

    def dG(self, q):
        P = self._P(q)
        dP = self._dP(q)  # dP[i][a,k] for horizontal column i
        out = np.zeros((3, 3, 3))
        for k in range(3):
            for i in range(2):
                out[k] += np.outer(dP[i][:, k], P[:, i]) + np.outer(P[:, i], dP[i][:, k])
        return out

    def d2G(self, q):
        P = self._P(q)
        dP = self._dP(q)
        d2P = self._d2P(q)  # d2P[i][a,k,l]
        out = np.zeros((3, 3, 3, 3))
        for k in range(3):
            for l in range(3):
                for i in range(2):
                    out[k, l] += (np.outer(d2P[i][:, k, l], P[:, i])
                                  + np.outer(P[:, i], d2P[i][:, k, l])
                                  + np.outer(dP[i][:, k], dP[i][:, l])
                                  + np.outer(dP[i][:, l], dP[i][:, k]))
        return out

    def all(self, q):
        return self.G(q), self.dG(q), self.d2G(q)
