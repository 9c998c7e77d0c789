import numpy as np
import pytest

import semilab as sl
from semilab.errors import EmptyProbeSet, HypothesisViolation, NotANode

from conftest import random_vector


class TestSolveIVP:
    def test_homogeneous_matches_oracle(self, grid, corpus, rng):
        for name, op in corpus.items():
            x = random_vector(rng, op.dim)
            u = sl.solve_ivp(op, sl.ZeroForcing(op.dim), x, grid)
            for i in (0, len(u.grid.nodes) // 2, -1):
                t = u.grid.nodes[i]
                exact = op.semigroup_apply_oracle(t, x)
                assert op.norm0(u.values[i] - exact) <= 1e-12 * max(op.norm0(exact), 1.0), name

    def test_scalar_exponential_forcing(self, grid):
        # A = -1, f = e^{-t}, x = 0 (resonant case: u(t) = t e^{-t})
        op = sl.diagonal_operator([-1.0])
        u = sl.solve_ivp(op, sl.ExpForcing(1.0, np.array([1.0])), np.zeros(1), grid)
        exact = u.grid.nodes * np.exp(-u.grid.nodes)
        assert np.allclose(u.values[:, 0], exact, atol=1e-12)

    def test_scalar_nonresonant(self, grid):
        # A = -1, f = e^{-mub t}x, mu = 2: u = (e^{-t} - e^{-2t}) / 1
        op = sl.diagonal_operator([-1.0])
        u = sl.solve_ivp(op, sl.ExpForcing(2.0, np.array([1.0])), np.zeros(1), grid)
        ts = u.grid.nodes
        exact = (np.exp(-ts) - np.exp(-2 * ts)) / 1.0
        assert np.allclose(u.values[:, 0], exact, atol=1e-12)

    def test_pure_integration(self, grid, scalar_zero):
        u = sl.solve_ivp(scalar_zero, sl.PolyForcing([1.0], np.array([1.0])),
                         np.zeros(1), grid)
        assert np.allclose(u.values[:, 0], u.grid.nodes, atol=1e-13)

    def test_initial_value_exact(self, grid, corpus, rng):
        op = corpus["jordan8"]
        x = random_vector(rng, 8)
        u = sl.solve_ivp(op, sl.ZeroForcing(8), x, grid)
        assert np.array_equal(u.values[0], x.astype(complex))

    def test_residual_post(self, grid, corpus, rng):
        for op in corpus.values():
            f = sl.ExpForcing(3.0 + 2.0j, random_vector(rng, op.dim))
            x = random_vector(rng, op.dim)
            u = sl.solve_ivp(op, f, x, grid)
            res = sl.ode_residuals(op, u, f)
            bound = 1e-9 * (1.0 + op.norm0(x) + 1.0)
            assert np.max(res) <= bound

    def test_verified_solve(self, grid, diag_12, rng):
        x = random_vector(rng, 2)
        u = sl.solve_ivp(diag_12, sl.ExpForcing(1.0, x), np.zeros(2), grid,
                         verify=True)
        assert u.grid.T == 1.0

    def test_stiff_fixture(self, grid, rng):
        # boundary layers of the n=256 Laplacian are resolved by the
        # exponential quadrature even on the default grid
        op = sl.laplacian_1d(256)
        x = random_vector(rng, 256)
        u = sl.solve_ivp(op, sl.ZeroForcing(256), x, grid)
        exact = op.semigroup_apply_oracle(1.0, x)
        assert op.norm0(u.values[-1] - exact) <= 1e-10


class TestKA:
    def test_zero_forcing(self, grid, diag_12):
        u = sl.solution_operator_KA(diag_12, sl.ZeroForcing(2), grid)
        assert np.all(u.values == 0)

    def test_linearity(self, grid, diag_12, rng):
        y1, y2 = random_vector(rng, 2), random_vector(rng, 2)
        f = sl.ExpForcing(1.5, y1)
        g = sl.ExpForcing(0.5, y2)
        uf = sl.solution_operator_KA(diag_12, f, grid)
        ug = sl.solution_operator_KA(diag_12, g, grid)
        fg = sl.CallableForcing(lambda t: f.eval(t) + g.eval(t), 2, rate=1.5)
        both = sl.solution_operator_KA(diag_12, fg, grid)
        assert np.allclose(both.values, uf.values + ug.values, atol=1e-10)

    def test_scalar_closed_form(self, grid, scalar_zero):
        # A = 0: K_A(e^{-mub t} x) = (1 - e^{-mub t}) x / mub
        mub = 2.0
        u = sl.solution_operator_KA(scalar_zero, sl.ExpForcing(mub, np.array([1.0])), grid)
        ts = u.grid.nodes
        assert np.allclose(u.values[:, 0], (1 - np.exp(-mub * ts)) / mub, atol=1e-13)

    def test_continuity_ratio_reported(self, grid, diag_12):
        u, ratio = sl.solution_operator_KA(diag_12, sl.ExpForcing(1.0, np.ones(2)),
                                           grid, report_ratio=True)
        assert ratio > 0

    def test_uniqueness_of_zero_solution(self, grid, corpus):
        # homogeneous problem with x = 0 stays at 0 in the E1(J)-norm
        for op in corpus.values():
            u = sl.solve_ivp(op, sl.ZeroForcing(op.dim), np.zeros(op.dim), grid)
            assert sl.e1_norm_J(op, u) <= 1e-9


class TestEstimateM:
    def test_scalar_hand_value(self, grid, scalar_minus_one):
        # probe (f=0, x=1): u = e^{-t}, sup(|u'| + |u| + |Au|) = 3 at t=0,
        # denominator ||x||_1 = 2, ratio 3/2
        est = sl.estimate_M(scalar_minus_one, grid,
                            [(sl.ZeroForcing(1), np.array([1.0]))])
        assert est.M_hat == pytest.approx(1.5, rel=1e-12)
        assert est.probe_count == 1

    def test_probe_scale_invariance(self, grid, diag_12, rng):
        y = random_vector(rng, 2)
        x = random_vector(rng, 2)
        one = sl.estimate_M(diag_12, grid, [(sl.ExpForcing(1.0, y), x)])
        two = sl.estimate_M(diag_12, grid, [(sl.ExpForcing(1.0, 2 * y), 2 * x)])
        assert one.M_hat == pytest.approx(two.M_hat, rel=1e-12)

    def test_monotone_in_probes(self, grid, diag_12):
        probes = sl.default_probes(diag_12, seed=5)
        prev = 0.0
        for k in range(1, len(probes) + 1):
            est = sl.estimate_M(diag_12, grid, probes[:k])
            assert est.M_hat >= prev
            prev = est.M_hat

    def test_empty_probes(self, grid, diag_12):
        with pytest.raises(EmptyProbeSet):
            sl.estimate_M(diag_12, grid, [])

    def test_refinement_stability(self, diag_12):
        probes = sl.default_probes(diag_12, seed=5)
        coarse = sl.estimate_M(diag_12, sl.TimeGrid.uniform(1.0, panels=16), probes)
        fine = sl.estimate_M(diag_12, sl.TimeGrid.uniform(1.0, panels=32), probes)
        assert fine.M_hat == pytest.approx(coarse.M_hat, rel=5e-3)


class TestGlueCheck:
    def test_zero_solution(self, diag_12):
        grid = sl.TimeGrid.uniform(1.0, panels=8)
        ext = sl.TimeGrid.uniform(2.0, panels=16)
        u = sl.GridFunction(grid, np.zeros((len(grid.nodes), 2)))
        rep = sl.glue_check(diag_12, u, 0.5, ext)
        assert rep.max_residual == 0.0
        assert rep.w_t1_norm == 0.0

    def test_nonzero_initial_value_rejected(self, diag_12, rng):
        grid = sl.TimeGrid.uniform(1.0, panels=8)
        ext = sl.TimeGrid.uniform(2.0, panels=16)
        x0 = random_vector(rng, 2)
        vals = np.array([diag_12.semigroup_apply_oracle(t, x0) for t in grid.nodes])
        u = sl.GridFunction(grid, vals)
        with pytest.raises(HypothesisViolation):
            sl.glue_check(diag_12, u, 0.5, ext)

    def test_single_node_perturbation_flagged(self, diag_12):
        grid = sl.TimeGrid.uniform(1.0, panels=8)
        ext = sl.TimeGrid.uniform(2.0, panels=16)
        vals = np.zeros((len(grid.nodes), 2))
        vals[10, 0] = 1e-6
        u = sl.GridFunction(grid, vals)
        rep = sl.glue_check(diag_12, u, 0.5, ext)
        dt = np.min(np.diff(grid.nodes))
        assert rep.precondition_residual >= 0.1 * 1e-6 / dt

    def test_t1_must_be_edge(self, diag_12):
        grid = sl.TimeGrid.uniform(1.0, panels=8)
        ext = sl.TimeGrid.uniform(2.0, panels=16)
        u = sl.GridFunction(grid, np.zeros((len(grid.nodes), 2)))
        with pytest.raises(NotANode):
            sl.glue_check(diag_12, u, 0.3, ext)
