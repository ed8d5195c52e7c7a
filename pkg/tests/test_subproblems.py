import numpy as np
import pytest
from instances import random_instance

from d2dsec import fp, rates, socp, subproblems
from d2dsec.channel import generate_realization
from d2dsec.config import SystemConfig
from d2dsec.optimizer import SchemeId, run


def _warm_point(seed, beta=0.5, **dims):
    """A leakage-feasible design point: a few outer iterations of the solver."""
    base = dict(M=2, K_L=3, K_E=2, N=1, beta=beta, t_max=3, sigma2=1.0)
    base.update(dims)
    cfg = SystemConfig(**base)
    ch = generate_realization(cfg, seed=seed)
    dv, trace, rep = run(ch, cfg, SchemeId.PROPOSED_D2D)
    assert trace.status != "failed"
    import dataclasses
    return dataclasses.replace(cfg, t_max=100), ch, dv


def _surrogate_objective(ch, dv, aux, cfg):
    """min_k rate surrogate at (possibly new) dv with frozen auxiliaries."""
    st = rates.build_stacked(ch, dv, cfg)
    return min(fp.surrogate_rate_rhs(k, aux, st, dv, cfg)
               for k in range(ch.h.shape[0]))


def _surrogate_leak_max(ch, dv, aux, cfg):
    st = rates.build_stacked(ch, dv, cfg)
    K_L, K_E = ch.h.shape[0], ch.g.shape[0]
    return max(a - b for k in range(K_L) for m in range(K_E)
               for (a, b) in [fp.surrogate_leak_terms(k, m, aux, ch, st, dv, cfg)])


class TestBeamformingStep:
    def test_solution_feasible_and_ascending(self):
        for seed in [0, 1, 2]:
            cfg, ch, dv = _warm_point(seed)
            st = rates.build_stacked(ch, dv, cfg)
            aux = fp.update_all(ch, st, dv, cfg)
            cp = subproblems.assemble_bf_subproblem(ch, st, dv, aux, cfg)
            res = socp.solve(cp)
            assert res.status == "optimal"
            new = subproblems.extract_bf(res, dv)
            # block separation: alpha untouched
            assert np.array_equal(new.alpha, dv.alpha)
            # exact feasibility of the new point
            assert rates.bs_power(new) <= cfg.P_B + 1e-6
            rep = rates.report(ch, new, cfg)
            assert rep.leak.max() <= cfg.beta + 1e-5
            for n in range(cfg.N):
                p = abs(new.alpha[n]) ** 2 * rates.relay_rx_power(n, ch, new, cfg)
                assert p <= cfg.P_U + 1e-6
            # monotone ascent on the exact objective
            assert rep.R_min >= rates.report(ch, dv, cfg).R_min - 1e-7

    def test_objective_is_surrogate_min_rate(self):
        cfg, ch, dv = _warm_point(7)
        st = rates.build_stacked(ch, dv, cfg)
        aux = fp.update_all(ch, st, dv, cfg)
        res = socp.solve(subproblems.assemble_bf_subproblem(ch, st, dv, aux, cfg))
        new = subproblems.extract_bf(res, dv)
        assert res.objective_value == pytest.approx(
            _surrogate_objective(ch, new, aux, cfg), abs=1e-5)
        # the surrogate never overstates the exact rate
        assert res.objective_value <= rates.report(ch, new, cfg).R_min + 1e-6


class TestAlphaStep:
    def test_solution_feasible_and_ascending(self):
        for seed in [3, 4]:
            cfg, ch, dv = _warm_point(seed)
            st = rates.build_stacked(ch, dv, cfg)
            aux = fp.update_all(ch, st, dv, cfg)
            cp = subproblems.assemble_alpha_subproblem(ch, dv, aux, cfg)
            res = socp.solve(cp)
            assert res.status == "optimal"
            new = subproblems.extract_alpha(res, dv)
            assert np.array_equal(new.v, dv.v)
            assert np.array_equal(new.Qtilde, dv.Qtilde)
            rep = rates.report(ch, new, cfg)
            assert rep.leak.max() <= cfg.beta + 1e-5
            p_r = rates.relay_rx_power(0, ch, dv, cfg)
            assert abs(new.alpha[0]) ** 2 * p_r <= cfg.P_U + 1e-6
            assert rep.R_min >= rates.report(ch, dv, cfg).R_min - 1e-7

    def test_matches_polar_grid_search(self):
        # N=1: the alpha subproblem against a 100x100 polar grid on the
        # frozen-auxiliary surrogate objective
        for seed in range(5):
            cfg, ch, dv = _warm_point(10 + seed, beta=0.4)
            st = rates.build_stacked(ch, dv, cfg)
            aux = fp.update_all(ch, st, dv, cfg)
            res = socp.solve(subproblems.assemble_alpha_subproblem(ch, dv, aux, cfg))
            assert res.status == "optimal"

            p_r = rates.relay_rx_power(0, ch, dv, cfg)
            a_max = np.sqrt(cfg.P_U / p_r)
            cand = dv.copy()

            def grid_best(mags, phases):
                best, arg = -np.inf, (0.0, 0.0)
                for mag in mags:
                    for ph in phases:
                        cand.alpha = np.array([mag * np.exp(1j * ph)])
                        if (_surrogate_leak_max(ch, cand, aux, cfg)
                                > cfg.beta + 1e-8):
                            continue
                        obj = _surrogate_objective(ch, cand, aux, cfg)
                        if obj > best:
                            best, arg = obj, (mag, ph)
                return best, arg

            best, (m0, p0) = grid_best(
                np.linspace(0.0, a_max, 100),
                np.linspace(0.0, 2 * np.pi, 100, endpoint=False))
            # refine around the coarse argmax so the oracle's own
            # discretization error stays below the match tolerance
            dm, dp = a_max / 99.0, 2 * np.pi / 100.0
            fine, _ = grid_best(
                np.linspace(max(0.0, m0 - dm), min(a_max, m0 + dm), 100),
                np.linspace(p0 - dp, p0 + dp, 100))
            best = max(best, fine)
            assert res.objective_value >= best - 1e-6
            assert res.objective_value <= best + 1e-3


class TestExtraction:
    def test_bf_extract_shapes(self):
        cfg, ch, dv = _warm_point(20)
        st = rates.build_stacked(ch, dv, cfg)
        aux = fp.update_all(ch, st, dv, cfg)
        res = socp.solve(subproblems.assemble_bf_subproblem(ch, st, dv, aux, cfg))
        new = subproblems.extract_bf(res, dv)
        assert new.v.shape == dv.v.shape
        assert new.Qtilde.shape == dv.Qtilde.shape
        assert new.v.dtype == complex and new.Qtilde.dtype == complex
