"""Left-invariant constant-curvature models in Lie-exponential coordinates.

Basis order is (f1, f2, f0) with bracket table
    [f1, f2] = -f0,   [f1, f0] = kappa f2,   [f2, f0] = -kappa f1,
so the frame at chart point q is F(ad_q) applied to the basis, where
F(A) = I + A/2 + c(s) A^2, s = kappa (x^2 + y^2) + kappa^2 z^2, and c is the
dexp coefficient (analytic for s < 4 pi^2).
"""
from __future__ import annotations

import numpy as np

from ._cometric import Cometric
from ._scalars import dexp_coefficient


class KChart:
    def __init__(self, kappa: float):
        self.kappa = float(kappa)
        k = self.kappa
        C = np.zeros((3, 3, 3))  # [e_j, e_l] = sum_i C[i,j,l] e_i
        C[2, 0, 1], C[2, 1, 0] = -1.0, 1.0
        C[1, 0, 2], C[1, 2, 0] = k, -k
        C[0, 1, 2], C[0, 2, 1] = -k, k
        self._C = C
        self._adk = [np.einsum('ikj,k->ij', C, e) for e in np.eye(3)]

    def ad(self, u: np.ndarray) -> np.ndarray:
        return np.einsum('ikj,k->ij', self._C, u)

    def s(self, q: np.ndarray) -> float:
        k = self.kappa
        return k * (q[0] * q[0] + q[1] * q[1]) + k * k * q[2] * q[2]

    def frame(self, q: np.ndarray) -> np.ndarray:
        """Columns (f0, f1, f2) of the left-invariant frame at q."""
        A = self.ad(np.asarray(q, dtype=float))
        c = dexp_coefficient(self.s(q))[0]
        F = np.eye(3) + 0.5 * A + c * (A @ A)
        return F[:, [2, 0, 1]]

    def frame_batch(self, qs: np.ndarray) -> np.ndarray:
        """Vectorized frame for an (n, 3) array of points; returns (n, 3, 3)."""
        qs = np.atleast_2d(qs)
        A = np.einsum('ikj,nk->nij', self._C, qs)
        k = self.kappa
        s = k * (qs[:, 0] ** 2 + qs[:, 1] ** 2) + k * k * qs[:, 2] ** 2
        c = np.array([dexp_coefficient(si)[0] for si in s])
        F = np.eye(3)[None] + 0.5 * A + c[:, None, None] * np.einsum('nij,njk->nik', A, A)
        return F[:, :, [2, 0, 1]]

    def frame_with_derivs(self, q: np.ndarray, order: int = 2):
        """(F, dF[, d2F]) in internal (f1, f2, f0) column order."""
        q = np.asarray(q, dtype=float)
        k = self.kappa
        s = self.s(q)
        sg = np.array([2 * k * q[0], 2 * k * q[1], 2 * k * k * q[2]])
        sh = np.array([2 * k, 2 * k, 2 * k * k])
        c, dc, ddc = dexp_coefficient(s)
        A = self.ad(q)
        A2 = A @ A
        adk = self._adk
        F = np.eye(3) + 0.5 * A + c * A2
        T = [adk[k_] @ A + A @ adk[k_] for k_ in range(3)]
        dF = [0.5 * adk[k_] + dc * sg[k_] * A2 + c * T[k_] for k_ in range(3)]
        if order < 2:
            return F, dF
        d2F = [[None] * 3 for _ in range(3)]
        for a in range(3):
            for b in range(a, 3):
                U = adk[a] @ adk[b] + adk[b] @ adk[a]
                M = (ddc * sg[a] * sg[b] * A2
                     + dc * ((sh[a] if a == b else 0.0) * A2 + sg[a] * T[b] + sg[b] * T[a])
                     + c * U)
                d2F[a][b] = M
                d2F[b][a] = M
        return F, dF, d2F


class KChartCometric(Cometric):
    def __init__(self, chart: KChart):
        self._chart = chart

    def all(self, q):
        F, dF, d2F = self._chart.frame_with_derivs(q)
        P = F[:, :2]
        dP = [dF[k][:, :2] for k in range(3)]
        G = P @ P.T
        dG = np.stack([dP[k] @ P.T + P @ dP[k].T for k in range(3)])
        d2G = np.zeros((3, 3, 3, 3))
        for k in range(3):
            for l in range(k, 3):
                d2 = d2F[k][l][:, :2]
                M = d2 @ P.T + P @ d2.T + dP[k] @ dP[l].T + dP[l] @ dP[k].T
                d2G[k, l] = M
                d2G[l, k] = M
        return G, dG, d2G

    def pair(self, q):
        F, dF = self._chart.frame_with_derivs(q, order=1)
        P = F[:, :2]
        dP = [dF[k][:, :2] for k in range(3)]
        G = P @ P.T
        dG = np.stack([dP[k] @ P.T + P @ dP[k].T for k in range(3)])
        return G, dG

    def G(self, q):
        return self.pair(q)[0]

    def dG(self, q):
        return self.pair(q)[1]

    def d2G(self, q):
        return self.all(q)[2]
