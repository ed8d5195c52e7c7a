"""Stacked effective channels and exact rate / leakage evaluation.

Each user k combines its downlink observation with the N amplify-and-forward
D2D observations, which stacks into an (N+1)-dimensional effective channel.
All rates are in bits (log base 2).
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .channel import ChannelRealization
from .config import SystemConfig

LN2 = np.log(2.0)


@dataclass
class DesignVariables:
    """Precoders, artificial-noise factor and amplification coefficients.

    v      : (K_L, M) complex, row l is the precoder v_l
    Qtilde : (M, M) complex free factor; the AN covariance is Qtilde @ Qtilde^H
    alpha  : (N,) complex, alpha[n] amplifies relay j_n
    """

    v: np.ndarray
    Qtilde: np.ndarray
    alpha: np.ndarray

    def qb(self) -> np.ndarray:
        """AN covariance Q_B (Hermitian PSD by construction)."""
        return self.Qtilde @ self.Qtilde.conj().T

    def copy(self) -> "DesignVariables":
        return DesignVariables(self.v.copy(), self.Qtilde.copy(), self.alpha.copy())

    def scaled(self, factor: float) -> "DesignVariables":
        return DesignVariables(self.v * factor, self.Qtilde * factor, self.alpha.copy())


@dataclass
class StackedMatrices:
    """Per-user / per-eavesdropper stacked effective channels.

    Hbar[k] : (N+1, M), row 0 is h_k^H, row n is the relayed copy through j_n
              (zeroed by the indicator when j_n == k)
    Gbar[m] : (N+1, M), same stacking seen by eavesdropper m
    Zbar_L[k], Zbar_E[m] : (N+1,) diagonals of the amplified-noise
              covariances (entry 0 is always 0)
    """

    Hbar: np.ndarray
    Gbar: np.ndarray
    Zbar_L: np.ndarray
    Zbar_E: np.ndarray


@dataclass
class RateReport:
    R: np.ndarray          # (K_L,) per-user rates
    R_min: float
    leak: np.ndarray       # (K_L, K_E) leakage f_{E,k,m}
    R_sec: np.ndarray      # (K_L,) max(R_k - beta, 0)
    R_sec_min: float


def build_stacked(ch: ChannelRealization, dv: DesignVariables,
                  cfg: SystemConfig) -> StackedMatrices:
    K_L, M = ch.h.shape
    K_E = ch.g.shape[0]
    N = len(ch.relays)
    Hbar = np.zeros((K_L, N + 1, M), dtype=complex)
    Gbar = np.zeros((K_E, N + 1, M), dtype=complex)
    Zbar_L = np.zeros((K_L, N + 1))
    Zbar_E = np.zeros((K_E, N + 1))

    Hbar[:, 0, :] = ch.h.conj()
    Gbar[:, 0, :] = ch.g.conj()
    for n, j in enumerate(ch.relays):
        hjH = ch.h[j].conj()
        for k in range(K_L):
            if j != k:
                Hbar[k, n + 1] = ch.h_d2d[k, j] * dv.alpha[n] * hjH
                Zbar_L[k, n + 1] = (cfg.sigma2 * np.abs(ch.h_d2d[k, j]) ** 2
                                    * np.abs(dv.alpha[n]) ** 2)
        for m in range(K_E):
            Gbar[m, n + 1] = ch.g_d2d[m, j] * dv.alpha[n] * hjH
            Zbar_E[m, n + 1] = (cfg.sigma2 * np.abs(ch.g_d2d[m, j]) ** 2
                                * np.abs(dv.alpha[n]) ** 2)
    return StackedMatrices(Hbar=Hbar, Gbar=Gbar, Zbar_L=Zbar_L, Zbar_E=Zbar_E)


def _interference_cov(B, zdiag, k, dv, cfg):
    """sigma^2 I + Zbar + B (Q_B + sum_{l != k} v_l v_l^H) B^H for stack B."""
    n1 = B.shape[0]
    W = B @ dv.Qtilde                      # (N+1, M)
    C = W @ W.conj().T
    C += np.diag(zdiag).astype(complex)
    C += cfg.sigma2 * np.eye(n1)
    U = B @ dv.v.T                         # (N+1, K_L), column l is B v_l
    for l in range(dv.v.shape[0]):
        if l != k:
            C += np.outer(U[:, l], U[:, l].conj())
    return C


def cov_legit(k, st: StackedMatrices, dv: DesignVariables, cfg: SystemConfig):
    """Noise-plus-interference covariance C_{L,k} seen by user k."""
    return _interference_cov(st.Hbar[k], st.Zbar_L[k], k, dv, cfg)


def cov_eve(k, m, st: StackedMatrices, dv: DesignVariables, cfg: SystemConfig):
    """Covariance C_{E,k,m} seen by eavesdropper m when decoding s_k."""
    return _interference_cov(st.Gbar[m], st.Zbar_E[m], k, dv, cfg)


def _rank_one_rate(U, C):
    """log2(1 + U^H C^{-1} U) via Cholesky, no explicit inverse."""
    L = cholesky(C, lower=True)
    y = solve_triangular(L, U, lower=True)
    return float(np.log2(1.0 + np.real(np.vdot(y, y))))


def legit_rate(k, ch, dv, cfg, st: StackedMatrices = None) -> float:
    """Achievable rate f_{L,k} of user k in bits/s/Hz."""
    if st is None:
        st = build_stacked(ch, dv, cfg)
    U = st.Hbar[k] @ dv.v[k]
    return _rank_one_rate(U, cov_legit(k, st, dv, cfg))


def leakage(k, m, ch, dv, cfg, st: StackedMatrices = None) -> float:
    """Information leakage f_{E,k,m} of s_k to eavesdropper m in bits/s/Hz."""
    if st is None:
        st = build_stacked(ch, dv, cfg)
    U = st.Gbar[m] @ dv.v[k]
    return _rank_one_rate(U, cov_eve(k, m, st, dv, cfg))


def mi_oracle(U, C) -> float:
    """Independent oracle: log2 det(C + U U^H) - log2 det(C).

    Equals the rank-one form log2(1 + U^H C^{-1} U) by the matrix
    determinant lemma; used to cross-check legit_rate/leakage.
    """
    C = np.asarray(C, dtype=complex)
    w = np.linalg.eigvalsh(C)
    if w.min() <= 0:
        raise ValueError("C must be Hermitian positive definite")
    s1, d1 = np.linalg.slogdet(C + np.outer(U, np.conj(U)))
    s2, d2 = np.linalg.slogdet(C)
    return float((d1 - d2) / LN2)


def relay_rx_power(n, ch, dv, cfg) -> float:
    """Downlink power p_{r,j_n} received by relay j_n (drives Eq.-(6) scaling)."""
    j = ch.relays[n]
    hH = ch.h[j].conj()
    p = float(np.sum(np.abs(dv.v @ ch.h[j].conj()) ** 2))
    p += float(np.linalg.norm(dv.Qtilde.conj().T @ ch.h[j]) ** 2)
    return p + cfg.sigma2


def bs_power(dv: DesignVariables) -> float:
    """Total transmit power sum ||v_l||^2 + tr(Q_B)."""
    return float(np.sum(np.abs(dv.v) ** 2) + np.sum(np.abs(dv.Qtilde) ** 2))


def report(ch, dv, cfg) -> RateReport:
    """Evaluate all rates, leakages and secrecy rates for one design point."""
    st = build_stacked(ch, dv, cfg)
    K_L, K_E = ch.h.shape[0], ch.g.shape[0]
    R = np.array([legit_rate(k, ch, dv, cfg, st) for k in range(K_L)])
    leak = np.array([[leakage(k, m, ch, dv, cfg, st) for m in range(K_E)]
                     for k in range(K_L)])
    R_sec = np.maximum(R - cfg.beta, 0.0)
    return RateReport(R=R, R_min=float(R.min()), leak=leak,
                      R_sec=R_sec, R_sec_min=float(R_sec.min()))
