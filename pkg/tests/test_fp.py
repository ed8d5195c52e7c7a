import numpy as np
import pytest
from instances import random_instance

from d2dsec import fp, rates
from d2dsec.rates import LN2, build_stacked


def _logdet2(A):
    sign, val = np.linalg.slogdet(A)
    return val / LN2


def _rand_psd(rng, n, scale=1.0):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (A @ A.conj().T)


class TestPhi:
    def test_scalar_sinr_form(self):
        # optimal (gamma, theta) for scalars: phi == log2(1 + |c|^2/(d - |c|^2))
        rng = np.random.default_rng(0)
        for _ in range(50):
            c = rng.standard_normal() + 1j * rng.standard_normal()
            d = abs(c) ** 2 + rng.uniform(0.1, 5.0)
            theta = c / d
            gamma = abs(c) ** 2 / (d - abs(c) ** 2)
            val = fp.phi(gamma, theta, c, d)
            assert val == pytest.approx(np.log2(1 + abs(c) ** 2 / (d - abs(c) ** 2)),
                                        abs=1e-12)

    def test_matrix_optimum_over_b(self):
        # phi maximized over B numerically never beats the closed-form optimum
        rng = np.random.default_rng(1)
        for _ in range(10):
            n, r = 3, 2
            C = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
            D = _rand_psd(rng, n) + C @ C.conj().T + np.eye(n)
            A = _rand_psd(rng, r, 0.5)
            B_star = np.linalg.solve(D, C)
            best = fp.phi(A, B_star, C, D)
            for _ in range(50):
                B = B_star + 0.3 * (rng.standard_normal((n, r))
                                    + 1j * rng.standard_normal((n, r)))
                assert fp.phi(A, B, C, D) <= best + 1e-9


class TestAuxiliaryUpdates:
    def test_rate_tightness(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            cfg, ch, dv = random_instance(rng)
            st = build_stacked(ch, dv, cfg)
            aux = fp.update_all(ch, st, dv, cfg)
            for k in range(cfg.K_L):
                rhs = fp.surrogate_rate_rhs(k, aux, st, dv, cfg)
                assert rhs == pytest.approx(rates.legit_rate(k, ch, dv, cfg, st),
                                            abs=1e-7)

    def test_leakage_tightness(self):
        rng = np.random.default_rng(3)
        for _ in range(60):
            cfg, ch, dv = random_instance(rng)
            st = build_stacked(ch, dv, cfg)
            aux = fp.update_all(ch, st, dv, cfg)
            for k in range(cfg.K_L):
                for m in range(cfg.K_E):
                    a_rhs, b_rhs = fp.surrogate_leak_terms(k, m, aux, ch, st, dv, cfg)
                    C = rates.cov_eve(k, m, st, dv, cfg)
                    u = st.Gbar[m] @ dv.v[k]
                    assert a_rhs == pytest.approx(
                        _logdet2(C + np.outer(u, u.conj())), abs=1e-7)
                    assert b_rhs == pytest.approx(_logdet2(C), abs=1e-7)
                    assert a_rhs - b_rhs == pytest.approx(
                        rates.leakage(k, m, ch, dv, cfg, st), abs=1e-7)

    def test_dominance_nonoptimal_aux(self):
        # minorant/majorant property for perturbed (non-optimal) auxiliaries
        rng = np.random.default_rng(4)
        count = 0
        while count < 1000:
            cfg, ch, dv = random_instance(rng)
            st = build_stacked(ch, dv, cfg)
            aux = fp.update_all(ch, st, dv, cfg)
            # perturb every auxiliary away from its optimizer
            aux.gamma += rng.uniform(0.0, 1.0, size=aux.gamma.shape)
            aux.theta += 0.3 * (rng.standard_normal(aux.theta.shape)
                                + 1j * rng.standard_normal(aux.theta.shape))
            aux.Theta += 0.3 * (rng.standard_normal(aux.Theta.shape)
                                + 1j * rng.standard_normal(aux.Theta.shape))
            for k in range(cfg.K_L):
                for m in range(cfg.K_E):
                    aux.Gamma[k, m] += _rand_psd(rng, aux.Gamma.shape[-1], 0.1)
                    aux.Sigma[k, m] += _rand_psd(rng, cfg.N + 1, 0.2)
            for k in range(cfg.K_L):
                rhs = fp.surrogate_rate_rhs(k, aux, st, dv, cfg)
                assert rhs <= rates.legit_rate(k, ch, dv, cfg, st) + 1e-9
                for m in range(cfg.K_E):
                    a_rhs, b_rhs = fp.surrogate_leak_terms(k, m, aux, ch, st, dv, cfg)
                    C = rates.cov_eve(k, m, st, dv, cfg)
                    u = st.Gbar[m] @ dv.v[k]
                    assert a_rhs >= _logdet2(C + np.outer(u, u.conj())) - 1e-9
                    assert b_rhs <= _logdet2(C) + 1e-9
                    count += 1

    def test_gamma_psd_and_sigma_floor(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            cfg, ch, dv = random_instance(rng)
            st = build_stacked(ch, dv, cfg)
            aux = fp.update_all(ch, st, dv, cfg)
            for k in range(cfg.K_L):
                assert aux.gamma[k] >= 0.0
                for m in range(cfg.K_E):
                    wg = np.linalg.eigvalsh(aux.Gamma[k, m])
                    assert wg.min() >= -1e-10
                    ws = np.linalg.eigvalsh(aux.Sigma[k, m])
                    assert ws.min() >= cfg.sigma2 - 1e-10


class TestHattedMatrices:
    def test_chat_equals_cov_eve(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            cfg, ch, dv = random_instance(rng)
            st = build_stacked(ch, dv, cfg)
            for k in range(cfg.K_L):
                for m in range(cfg.K_E):
                    hat = fp.build_hatted(k, m, ch, st, dv, cfg)
                    C = rates.cov_eve(k, m, st, dv, cfg)
                    assert np.allclose(hat.Chat, C, atol=1e-10)

    def test_ztilde_square_root(self):
        rng = np.random.default_rng(7)
        cfg, ch, dv = random_instance(rng, N=2, K_L=4)
        st = build_stacked(ch, dv, cfg)
        for m in range(cfg.K_E):
            z = fp.ztilde_diag(m, ch, dv, cfg)
            assert np.allclose(np.abs(z) ** 2, st.Zbar_E[m], atol=1e-12)

    def test_vhat_dimensions(self):
        rng = np.random.default_rng(8)
        cfg, ch, dv = random_instance(rng, M=3, K_L=2, K_E=1, N=1)
        st = build_stacked(ch, dv, cfg)
        hat = fp.build_hatted(0, 0, ch, st, dv, cfg)
        Dv = cfg.M + cfg.K_L + cfg.N
        assert hat.Vhat.shape == (cfg.M * cfg.K_L + cfg.N + 1, Dv)
        assert hat.Ghat.shape == (cfg.N + 1, cfg.M * cfg.K_L + cfg.N + 1)
