"""Fractional-programming surrogates and closed-form auxiliary updates.

The rate and leakage log-det-ratio terms are replaced by biconvex bounds
built from the quadratic-transform function ``phi``; all auxiliary
variables have closed-form optimizers that make the bounds tight at the
current design point.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve, solve_triangular

from . import rates
from .config import SystemConfig
from .rates import LN2, DesignVariables, StackedMatrices


@dataclass
class AuxiliaryVariables:
    """All fixed-point auxiliaries of the surrogate problem.

    gamma[k]       : scalar SINR auxiliary for the rate bound
    theta[k]       : (N+1,) receive-combiner auxiliary for the rate bound
    Gamma[k, m]    : (Dv, Dv) Gram auxiliary for the leakage lower bound
    Theta[k, m]    : (N+1, Dv) combiner auxiliary for the leakage lower bound
    Sigma[k, m]    : (N+1, N+1) log-det upper-bound auxiliary

    Dv = M + K_L + N. Sigma (and Gamma/Theta) are kept per (k, m) pair:
    their updates depend on k through C_{E,k,m} and v_k.
    """

    gamma: np.ndarray
    theta: np.ndarray
    Gamma: np.ndarray
    Theta: np.ndarray
    Sigma: np.ndarray


@dataclass
class HattedMatrices:
    """Stacked factors turning log2 det C_{E,k,m} into a rank-structured form.

    Ghat : (N+1, M*K_L + N+1)
    Vhat : (M*K_L + N+1, M + K_L + N) block diagonal
    Cmat : Ghat @ Vhat, the effective "channel" of the leakage bound
    Chat : sigma^2 I + Cmat Cmat^H, equal to C_{E,k,m} entrywise
    """

    Ghat: np.ndarray
    Vhat: np.ndarray
    Cmat: np.ndarray
    Chat: np.ndarray


def phi(A, B, C, D) -> float:
    """Quadratic-transform surrogate value.

    log2 det(I+A) - tr(A)/ln2 + tr((I+A)(2 Re{C^H B} - B^H D B))/ln2.
    The real part on the cross term keeps the value real for complex
    arguments; at the closed-form auxiliary optimizers the cross term is
    real anyway.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.atleast_1d(np.asarray(B, dtype=complex))
    C = np.atleast_1d(np.asarray(C, dtype=complex))
    D = np.atleast_2d(np.asarray(D, dtype=complex))
    if B.ndim == 1:
        B = B[:, None]
    if C.ndim == 1:
        C = C[:, None]
    IA = np.eye(A.shape[0]) + A
    sign, logdet = np.linalg.slogdet(IA)
    cross = 2.0 * np.real(np.trace(IA @ (C.conj().T @ B)))
    quad = np.real(np.trace(IA @ (B.conj().T @ D @ B)))
    return float(logdet / LN2 - np.real(np.trace(A)) / LN2 + (cross - quad) / LN2)


def ztilde_diag(m, ch, dv, cfg) -> np.ndarray:
    """Diagonal factor of Zbar_{E,m}: entry n+1 is sigma * g^d2d_{m,j_n} * alpha_n.

    Phase-carrying square root (Ztilde Ztilde^H = Zbar_{E,m}); affine in
    alpha, which keeps the alpha-block subproblem convex.
    """
    N = len(ch.relays)
    z = np.zeros(N + 1, dtype=complex)
    for n, j in enumerate(ch.relays):
        z[n + 1] = np.sqrt(cfg.sigma2) * ch.g_d2d[m, j] * dv.alpha[n]
    return z


def update_info_aux(k, st: StackedMatrices, dv: DesignVariables, cfg: SystemConfig):
    """Closed-form (gamma, theta) making the rate surrogate tight at (v, Q, alpha)."""
    C = rates.cov_legit(k, st, dv, cfg)
    u = st.Hbar[k] @ dv.v[k]
    gamma = float(np.real(np.vdot(u, solve(C, u, assume_a="pos"))))
    theta = solve(C + np.outer(u, u.conj()), u, assume_a="pos")
    return gamma, theta


def build_hatted(k, m, ch, st: StackedMatrices, dv: DesignVariables,
                 cfg: SystemConfig) -> HattedMatrices:
    K_L, M = ch.h.shape
    N = len(ch.relays)
    n1 = N + 1
    Ghat = np.hstack([np.tile(st.Gbar[m], (1, K_L)), np.eye(n1)])
    Dv = M + K_L + N
    Vhat = np.zeros((M * K_L + n1, Dv), dtype=complex)
    Vhat[:M, :M] = dv.Qtilde
    col = M
    row = M
    for l in range(K_L):
        if l == k:
            continue
        Vhat[row:row + M, col] = dv.v[l]
        row += M
        col += 1
    Vhat[M * K_L:, col:] = np.diag(ztilde_diag(m, ch, dv, cfg))
    Cmat = Ghat @ Vhat
    Chat = cfg.sigma2 * np.eye(n1) + Cmat @ Cmat.conj().T
    return HattedMatrices(Ghat=Ghat, Vhat=Vhat, Cmat=Cmat, Chat=Chat)


def update_leak_aux(k, m, hat: HattedMatrices, cfg: SystemConfig):
    """Closed-form (Gamma, Theta) making the leakage lower bound tight."""
    Gamma = hat.Cmat.conj().T @ hat.Cmat / cfg.sigma2
    Theta = solve(hat.Chat, hat.Cmat, assume_a="pos")
    return Gamma, Theta


def update_sigma(k, m, st: StackedMatrices, dv: DesignVariables, cfg: SystemConfig):
    """Closed-form Sigma making the log-det upper bound tight."""
    C = rates.cov_eve(k, m, st, dv, cfg)
    u = st.Gbar[m] @ dv.v[k]
    return C + np.outer(u, u.conj())


def update_all(ch, st: StackedMatrices, dv: DesignVariables,
               cfg: SystemConfig) -> AuxiliaryVariables:
    """Run every closed-form auxiliary update at the current design point."""
    K_L, M = ch.h.shape
    K_E = ch.g.shape[0]
    N = len(ch.relays)
    Dv = M + K_L + N
    gamma = np.zeros(K_L)
    theta = np.zeros((K_L, N + 1), dtype=complex)
    Gamma = np.zeros((K_L, K_E, Dv, Dv), dtype=complex)
    Theta = np.zeros((K_L, K_E, N + 1, Dv), dtype=complex)
    Sigma = np.zeros((K_L, K_E, N + 1, N + 1), dtype=complex)
    for k in range(K_L):
        gamma[k], theta[k] = update_info_aux(k, st, dv, cfg)
        for m in range(K_E):
            hat = build_hatted(k, m, ch, st, dv, cfg)
            Gamma[k, m], Theta[k, m] = update_leak_aux(k, m, hat, cfg)
            Sigma[k, m] = update_sigma(k, m, st, dv, cfg)
    return AuxiliaryVariables(gamma=gamma, theta=theta, Gamma=Gamma,
                              Theta=Theta, Sigma=Sigma)


def surrogate_rate_rhs(k, aux: AuxiliaryVariables, st: StackedMatrices,
                       dv: DesignVariables, cfg: SystemConfig) -> float:
    """RHS of the rate surrogate constraint; minorizes f_{L,k}."""
    C = rates.cov_legit(k, st, dv, cfg)
    u = st.Hbar[k] @ dv.v[k]
    return phi(aux.gamma[k], aux.theta[k], u, C + np.outer(u, u.conj()))


def surrogate_leak_terms(k, m, aux: AuxiliaryVariables, ch, st: StackedMatrices,
                         dv: DesignVariables, cfg: SystemConfig):
    """(A-bound RHS, B-bound RHS) of the leakage surrogate pair.

    The A bound majorizes log2 det(C_{E,k,m} + Gbar v_k v_k^H Gbar^H); the
    B bound minorizes log2 det(C_{E,k,m}).
    """
    n1 = len(ch.relays) + 1
    C = rates.cov_eve(k, m, st, dv, cfg)
    u = st.Gbar[m] @ dv.v[k]
    M_full = C + np.outer(u, u.conj())
    Sigma = aux.Sigma[k, m]
    L = cholesky(Sigma, lower=True)
    X = solve_triangular(L, M_full, lower=True)
    X = solve_triangular(L.conj().T, X, lower=False)
    sign, logdet_sigma = np.linalg.slogdet(Sigma)
    a_rhs = float(logdet_sigma / LN2 - n1 / LN2 + np.real(np.trace(X)) / LN2)

    hat = build_hatted(k, m, ch, st, dv, cfg)
    b_rhs = phi(aux.Gamma[k, m], aux.Theta[k, m], hat.Cmat, hat.Chat)
    b_rhs += n1 * np.log2(cfg.sigma2)
    return a_rhs, float(b_rhs)
