"""Fixed-auxiliary convex subproblems as real second-order cone programs.

With the auxiliaries frozen, both block subproblems (the beamforming block
{v, Qtilde} and the amplification block alpha) have the same shape: a
linear objective, affine epigraph couplings, and constraints that are an
affine term plus/minus a sum of squared norms of affine expressions. Each
squared-norm group gets its own epigraph variable s >= ||u||^2.
"""

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from . import rates
from .config import SystemConfig
from .fp import AuxiliaryVariables
from .rates import LN2, DesignVariables, StackedMatrices
from .socp import AffExpr, ConicProgram, SocpBuilder, concat, const_expr, stack_rows


class _LeakFactors:
    """Per-(k,m) constants derived from the frozen leakage auxiliaries."""

    def __init__(self, aux: AuxiliaryVariables, k, m, sigma2):
        n1 = aux.Sigma.shape[-1]
        Sigma = aux.Sigma[k, m]
        L = cholesky(Sigma, lower=True)
        self.W = solve_triangular(L, np.eye(n1), lower=True)   # Sigma^{-1} = W^H W
        self.logdet_sigma_ln = 2.0 * float(np.sum(np.log(np.real(np.diag(L)))))
        SigInv = self.W.conj().T @ self.W
        self.tr_sigma_inv = float(np.real(np.trace(SigInv)))
        self.diag_sigma_inv = np.real(np.diag(SigInv))

        Gamma = aux.Gamma[k, m]
        Theta = aux.Theta[k, m]
        IG = np.eye(Gamma.shape[0]) + Gamma
        F = cholesky(IG, lower=True)
        self.T = Theta @ IG                  # cross-term weight, (n1, Dv)
        ThF = Theta @ F
        self.ThFH = ThF.conj().T             # (Dv, n1)
        logdet_IG_ln = 2.0 * float(np.sum(np.log(np.real(np.diag(F)))))
        # constant part of the B bound (bits); the sigma^2 Theta term comes
        # from splitting Chat = sigma^2 I + C C^H inside phi
        self.constB = (n1 * np.log2(sigma2)
                       + logdet_IG_ln / LN2
                       - float(np.real(np.trace(Gamma))) / LN2
                       - sigma2 * float(np.linalg.norm(ThF) ** 2) / LN2)


def _declare_common(b: SocpBuilder, K_L, K_E):
    b.add_var("t")
    b.add_var("R", (K_L,))
    b.add_var("A", (K_L, K_E))
    b.add_var("B", (K_L, K_E))
    b.add_var("s_rate", (K_L,))
    b.add_var("s_A", (K_L, K_E))
    b.add_var("s_B", (K_L, K_E))


def _flat(K_E, k, m):
    return k * K_E + m


def _common_rows(b: SocpBuilder, cfg, K_L, K_E):
    """Objective, t <= R_k, and the leakage epigraph beta >= A - B."""
    b.set_objective(b.scalar_row("t"))
    t_row = b.scalar_row("t")
    for k in range(K_L):
        b.add_nonneg(b.scalar_row("R", k) - t_row, 0.0)
    for k in range(K_L):
        for m in range(K_E):
            i = _flat(K_E, k, m)
            b.add_nonneg(b.scalar_row("B", i) - b.scalar_row("A", i), cfg.beta)


def _rate_constraint(b, k, cross: AffExpr, quad: AffExpr, aux, zconst, cfg):
    """R_k <= const + 2 c Re{cross} - c (zconst + ||quad||^2)."""
    gamma = aux.gamma[k]
    theta = aux.theta[k]
    c = (1.0 + gamma) / LN2
    d = (np.log2(1.0 + gamma) - gamma / LN2
         - c * (cfg.sigma2 * float(np.linalg.norm(theta) ** 2) + zconst))
    s_row = b.scalar_row("s_rate", k)
    b.add_sqnorm_epigraph(s_row, quad)
    a_cr, b_cr = cross.real_row()
    # divide the row by c: at high SINR c is huge and unscaled coefficients
    # degrade the interior-point solution accuracy
    b.add_nonneg(2.0 * a_cr - b.scalar_row("R", k) / c - s_row,
                 d / c + 2.0 * b_cr)


def _a_bound_constraint(b, k, m, K_E, quad: AffExpr, const_ln, cfg):
    """ln2 * A_km >= const_ln + ||quad||^2 (log-det upper-bound surrogate)."""
    i = _flat(K_E, k, m)
    s_row = b.scalar_row("s_A", i)
    b.add_sqnorm_epigraph(s_row, quad)
    b.add_nonneg(LN2 * b.scalar_row("A", i) - s_row, -const_ln)


def _b_bound_constraint(b, k, m, K_E, cross: AffExpr, quad: AffExpr, lf, cfg):
    """B_km <= constB + (2/ln2) Re{cross} - (1/ln2) ||quad||^2."""
    i = _flat(K_E, k, m)
    s_row = b.scalar_row("s_B", i)
    b.add_sqnorm_epigraph(s_row, quad)
    a_cr, b_cr = cross.real_row()
    b.add_nonneg((2.0 / LN2) * a_cr - b.scalar_row("B", i) - s_row / LN2,
                 lf.constB + (2.0 / LN2) * b_cr)


def assemble_bf_subproblem(ch, st: StackedMatrices, dv: DesignVariables,
                           aux: AuxiliaryVariables, cfg: SystemConfig) -> ConicProgram:
    """Beamforming block: optimize {v, Qtilde} with alpha and auxiliaries fixed."""
    K_L, M = ch.h.shape
    K_E = ch.g.shape[0]
    N = len(ch.relays)
    n1 = N + 1

    b = SocpBuilder()
    b.add_var("v", (K_L, M), complex_valued=True)
    b.add_var("qtilde", (M, M), complex_valued=True)
    _declare_common(b, K_L, K_E)

    v_expr = b.expr("v")
    q_expr = b.expr("qtilde")
    _common_rows(b, cfg, K_L, K_E)

    # rate surrogates
    for k in range(K_L):
        theta = aux.theta[k]
        u = st.Hbar[k].conj().T @ theta            # Hbar_k^H theta
        cross = v_expr.entry(k).vdot(u)            # theta^H Hbar v_k
        parts = [v_expr.entry(l).vdot(u) for l in range(K_L)]
        parts.append(q_expr.lmul(u.conj()[None, :]))  # u^H Qtilde
        zconst = float(np.sum(st.Zbar_L[k] * np.abs(theta) ** 2))
        _rate_constraint(b, k, cross, concat(parts), aux, zconst, cfg)

    # leakage surrogates
    for k in range(K_L):
        for m in range(K_E):
            lf = _LeakFactors(aux, k, m, cfg.sigma2)
            G = st.Gbar[m]
            WG = lf.W @ G

            # A bound: quadratic pieces of tr(Sigma^{-1}(C_E + G v_k v_k^H G^H))
            quad_A = [q_expr.lmul(WG)]
            quad_A += [v_expr.entry(l).lmul(WG) for l in range(K_L)]
            const_ln = (lf.logdet_sigma_ln - n1
                        + cfg.sigma2 * lf.tr_sigma_inv
                        + float(np.sum(lf.diag_sigma_inv * st.Zbar_E[m])))
            _a_bound_constraint(b, k, m, K_E, concat(quad_A), const_ln, cfg)

            # B bound: C(x) = [G Qtilde, {G v_l}_{l!=k}, Ztilde]
            zt = np.zeros(n1, dtype=complex)
            zt[1:] = (np.sqrt(cfg.sigma2) * ch.g_d2d[m, ch.relays] * dv.alpha)
            Gq = q_expr.lmul(G)
            gv = {l: v_expr.entry(l).lmul(G) for l in range(K_L) if l != k}
            others = [l for l in range(K_L) if l != k]
            cross = Gq.ravel().vdot(lf.T[:, :M].ravel())
            for c, l in enumerate(others):
                cross = cross + gv[l].vdot(lf.T[:, M + c])
            Tz = lf.T[:, M + len(others):]
            cross = cross + np.vdot(np.diag(Tz), zt)

            quad_B = [Gq.lmul(lf.ThFH)]
            quad_B += [gv[l].lmul(lf.ThFH) for l in others]
            quad_B.append(const_expr(lf.ThFH @ np.diag(zt), b.nx))
            _b_bound_constraint(b, k, m, K_E, cross, concat(quad_B), lf, cfg)

    # BS power budget
    b.add_soc(concat([v_expr, q_expr]), np.zeros(b.nx), np.sqrt(cfg.P_B))

    # relay receive-power caps |alpha_n|^2 p_r <= P_U
    for n, j in enumerate(ch.relays):
        a = np.abs(dv.alpha[n])
        if a == 0.0:
            continue
        h = ch.h[j]
        parts = [v_expr.entry(l).vdot(h) * a for l in range(K_L)]
        parts.append(q_expr.lmul(h.conj()[None, :]) * a)
        parts.append(const_expr(np.array([a * np.sqrt(cfg.sigma2)]), b.nx))
        b.add_soc(concat(parts), np.zeros(b.nx), np.sqrt(cfg.P_U))

    return b.build()


def assemble_alpha_subproblem(ch, dv: DesignVariables, aux: AuxiliaryVariables,
                              cfg: SystemConfig) -> ConicProgram:
    """Amplification block: optimize alpha with {v, Qtilde} and auxiliaries fixed."""
    K_L, M = ch.h.shape
    K_E = ch.g.shape[0]
    N = len(ch.relays)
    n1 = N + 1

    b = SocpBuilder()
    b.add_var("alpha", (N,), complex_valued=True)
    _declare_common(b, K_L, K_E)

    al = b.expr("alpha")
    al_c = al.conj()
    _common_rows(b, cfg, K_L, K_E)

    # fixed-beamformer channel products
    hv_all = ch.h.conj() @ dv.v.T                 # h_k^H v_l, (K_L, K_L)
    hQ_all = ch.h.conj() @ dv.Qtilde              # h_k^H Qtilde, (K_L, M)
    hv = hv_all[ch.relays]                        # relay rows, (N, K_L)
    hQ = hQ_all[ch.relays]                        # (N, M)
    gv_all = ch.g.conj() @ dv.v.T                 # g_m^H v_l, (K_E, K_L)
    gQ_all = ch.g.conj() @ dv.Qtilde              # (K_E, M)

    # rate surrogates
    for k in range(K_L):
        theta = aux.theta[k]
        e = np.array([ch.h_d2d[k, j] if j != k else 0.0 for j in ch.relays])

        # cross: theta^H Hbar(alpha) v_k
        c_row = np.conj(theta[1:]) * e * hv[:, k]
        cross = al.lmul(c_row[None, :]).entry(0) + np.conj(theta[0]) * hv_all[k, k]

        # w(alpha) = Hbar^H theta; quadratic pieces v_l^H w and Qtilde^H w
        parts = []
        for l in range(K_L):
            row = theta[1:] * np.conj(e) * np.conj(hv[:, l])
            parts.append(al_c.lmul(row[None, :]).entry(0)
                         + theta[0] * np.conj(hv_all[k, l]))
        qw = const_expr(theta[0] * np.conj(hQ_all[k]), b.nx)
        for n in range(N):
            qw = qw + al_c.entry(n).times_vec(theta[n + 1] * np.conj(e[n])
                                              * np.conj(hQ[n]))
        parts.append(qw)
        # amplified-noise diagonal, sqrt(Zbar_L) entries
        for n, j in enumerate(ch.relays):
            if j != k:
                parts.append(al.entry(n) * (np.abs(theta[n + 1])
                                            * np.sqrt(cfg.sigma2)
                                            * np.abs(ch.h_d2d[k, j])))
        _rate_constraint(b, k, cross, concat(parts), aux, 0.0, cfg)

    # leakage surrogates
    for m in range(K_E):
        gd = ch.g_d2d[m, ch.relays]               # (N,)

        def gbar_times_vec(l):
            """Gbar_m(alpha) v_l as an (n1,) expression."""
            rows = [const_expr(np.array(gv_all[m, l]), b.nx)]
            for n in range(N):
                rows.append(al.entry(n) * (gd[n] * hv[n, l]))
            return concat(rows)

        def gbar_times_qt():
            """Gbar_m(alpha) Qtilde as an (n1, M) expression."""
            rows = [const_expr(gQ_all[m], b.nx)]
            for n in range(N):
                rows.append(al.entry(n).times_vec(gd[n] * hQ[n]))
            return stack_rows(rows)

        Gq = gbar_times_qt()
        gv_exprs = [gbar_times_vec(l) for l in range(K_L)]
        zt_exprs = [al.entry(n) * (np.sqrt(cfg.sigma2) * gd[n]) for n in range(N)]

        for k in range(K_L):
            lf = _LeakFactors(aux, k, m, cfg.sigma2)

            quad_A = [Gq.lmul(lf.W)]
            quad_A += [g.lmul(lf.W) for g in gv_exprs]
            # tr(Sigma^{-1} Zbar_E) entries, variable in alpha here
            for n in range(N):
                quad_A.append(al.entry(n) * (np.sqrt(lf.diag_sigma_inv[n + 1])
                                             * np.sqrt(cfg.sigma2) * np.abs(gd[n])))
            const_ln = lf.logdet_sigma_ln - n1 + cfg.sigma2 * lf.tr_sigma_inv
            _a_bound_constraint(b, k, m, K_E, concat(quad_A), const_ln, cfg)

            others = [l for l in range(K_L) if l != k]
            cross = Gq.ravel().vdot(lf.T[:, :M].ravel())
            for c, l in enumerate(others):
                cross = cross + gv_exprs[l].vdot(lf.T[:, M + c])
            Tz = lf.T[:, M + len(others):]
            for n in range(N):
                cross = cross + zt_exprs[n] * np.conj(Tz[n + 1, n + 1])

            quad_B = [Gq.lmul(lf.ThFH)]
            quad_B += [gv_exprs[l].lmul(lf.ThFH) for l in others]
            for n in range(N):
                quad_B.append(zt_exprs[n].times_vec(lf.ThFH[:, n + 1]))
            _b_bound_constraint(b, k, m, K_E, cross, concat(quad_B), lf, cfg)

    # per-relay power: |alpha_n| <= sqrt(P_U / p_r)
    for n, j in enumerate(ch.relays):
        p_r = rates.relay_rx_power(n, ch, dv, cfg)
        b.add_soc(al.entry(n), np.zeros(b.nx), np.sqrt(cfg.P_U / p_r))

    return b.build()


def extract_bf(result, dv: DesignVariables) -> DesignVariables:
    """New design point after a beamforming-block solve (alpha carried over)."""
    return DesignVariables(v=result.get("v"), Qtilde=result.get("qtilde"),
                           alpha=dv.alpha.copy())


def extract_alpha(result, dv: DesignVariables) -> DesignVariables:
    """New design point after an amplification-block solve."""
    return DesignVariables(v=dv.v.copy(), Qtilde=dv.Qtilde.copy(),
                           alpha=result.get("alpha"))
