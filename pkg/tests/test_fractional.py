"""Gamma function, fractional quadrature, and the boundary-value solver."""

import math

import numpy as np
import pytest

from relfix import (
    ContractionWarning,
    DomainError,
    FbvpProblem,
    Grid,
    OperatorVariant,
    PreconditionError,
    ShapeError,
    apply_operator,
    caputo_derivative_nodes,
    caputo_residual,
    gamma_fn,
    grid_fn,
    lambda_paper,
    lambda_tight,
    rl_integral,
    rl_integral_nodes,
    solve_fbvp,
    zero_grid_fn,
)
from relfix.fixtures import affine_source, constant_source, sine_mix_source


class TestGamma:
    def test_one_and_factorials(self):
        assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-14)
        assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-13)

    def test_half_squares_to_pi(self):
        assert gamma_fn(0.5) ** 2 == pytest.approx(math.pi, rel=1e-12)

    def test_two_point_five(self):
        assert gamma_fn(2.5) == pytest.approx(0.75 * math.sqrt(math.pi), rel=1e-12)

    def test_accuracy_contract_against_stdlib(self):
        zs = np.linspace(0.1, 30.0, 2991)
        worst = max(
            abs(gamma_fn(float(z)) - math.gamma(float(z))) / math.gamma(float(z))
            for z in zs
        )
        assert worst <= 1e-12

    def test_recurrence_property(self):
        for z in (0.3, 1.7, 6.4, 12.9):
            assert gamma_fn(z + 1.0) == pytest.approx(z * gamma_fn(z), rel=1e-13)

    def test_poles_out_of_scope(self):
        with pytest.raises(DomainError):
            gamma_fn(0.0)
        with pytest.raises(DomainError):
            gamma_fn(-1.5)


class TestRlIntegral:
    @pytest.mark.parametrize("beta", [1.1, 1.5, 2.0])
    @pytest.mark.parametrize("n", [8, 64])
    def test_exact_on_constants(self, beta, n):
        g = Grid(n)
        got = rl_integral_nodes(np.ones(n + 1), beta, g)
        want = g.nodes**beta / gamma_fn(beta + 1.0)
        assert np.max(np.abs(got - want)) <= 1e-10

    @pytest.mark.parametrize("beta", [1.1, 1.5, 2.0])
    @pytest.mark.parametrize("n", [8, 64])
    def test_exact_on_linears(self, beta, n):
        g = Grid(n)
        got = rl_integral_nodes(g.nodes, beta, g)
        want = g.nodes ** (beta + 1.0) / gamma_fn(beta + 2.0)
        assert np.max(np.abs(got - want)) <= 1e-10

    def test_linear_value_at_endpoint(self):
        g = Grid(32)
        value = rl_integral(grid_fn(g, g.nodes), 1.5, 32)
        assert value == pytest.approx(1.0 / gamma_fn(3.5), abs=1e-12)

    def test_quadratic_second_order_convergence(self):
        # closed form for the square integrand at t = 1 is 2 / Gamma(4.5)
        exact = 2.0 / gamma_fn(4.5)
        errs = {}
        for n in (64, 128):
            g = Grid(n)
            errs[n] = abs(rl_integral(grid_fn(g, g.nodes**2), 1.5, n) - exact)
        ratio = errs[64] / errs[128]
        assert 3.4 <= ratio <= 4.6

    def test_node_zero_is_zero(self):
        g = Grid(8)
        assert rl_integral(grid_fn(g, np.ones(9)), 1.5, 0) == 0.0

    def test_invalid_order_rejected(self):
        g = Grid(8)
        with pytest.raises(DomainError):
            rl_integral(zero_grid_fn(g), 0.0, 4)


class TestCaputoResidual:
    def test_power_function_rule(self):
        # the order-beta derivative of t^2 is 2 t^(2 - beta) / Gamma(3 - beta)
        g = Grid(64)
        x = grid_fn(g, g.nodes**2)
        f = lambda t, x_: 2.0 * np.asarray(t, dtype=float) ** 0.5 / gamma_fn(1.5)
        for idx in (1, 16, 32, 63):
            assert caputo_residual(x, 1.5, f, idx) <= 1e-12

    def test_linear_function_annihilated(self):
        g = Grid(32)
        x = grid_fn(g, g.nodes)
        f = lambda t, x_: 0.0 * np.asarray(t, dtype=float)
        assert caputo_residual(x, 1.5, f, 16) == 0.0

    def test_order_two_reduces_to_second_difference(self):
        g = Grid(32)
        x = grid_fn(g, 3.0 * g.nodes**2)
        cd = caputo_derivative_nodes(x, 2.0)
        assert np.max(np.abs(cd - 6.0)) <= 1e-9

    def test_boundary_nodes_rejected(self):
        g = Grid(16)
        x = zero_grid_fn(g)
        with pytest.raises(PreconditionError):
            caputo_residual(x, 1.5, lambda t, x_: 0.0, 0)
        with pytest.raises(PreconditionError):
            caputo_residual(x, 1.5, lambda t, x_: 0.0, 16)


class TestContractionConstants:
    def test_displayed_constant_hand_values(self):
        # hand evaluation with Gamma(3) = 2: 1/2 + (2 + 2 * 0.125) / (2 * 2.25) = 1
        assert lambda_paper(2.0, 0.5) == pytest.approx(1.0, abs=1e-12)
        assert lambda_paper(1.5, 0.5) == pytest.approx(1.5391270342392178, rel=1e-12)

    def test_tight_constant_hand_values(self):
        # hand evaluation with Gamma(3) = 2 and Gamma(4) = 6:
        # 1/2 + 2/(2.25 * 2) + 2 * 0.125 / (2.25 * 6) = 26/27
        assert lambda_tight(2.0, 0.5) == pytest.approx(26.0 / 27.0, abs=1e-12)
        assert lambda_tight(1.5, 0.5) == pytest.approx(1.4682039621678522, rel=1e-12)

    def test_small_k_limit_of_displayed_constant(self):
        beta = 1.5
        limit = 2.0 / gamma_fn(beta + 1.0)
        assert lambda_paper(beta, 1e-8) == pytest.approx(limit, rel=1e-6)

    def test_tight_below_displayed_on_grid(self):
        for beta in np.linspace(1.05, 2.0, 20):
            for k in np.linspace(0.05, 0.95, 20):
                assert lambda_tight(float(beta), float(k)) < lambda_paper(float(beta), float(k))

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            lambda_paper(1.0, 0.5)
        with pytest.raises(DomainError):
            lambda_tight(1.5, 1.0)


class TestApplyOperator:
    def test_zero_source_maps_everything_to_zero(self):
        problem = FbvpProblem(beta=1.5, k=0.5, L=0.0, f=constant_source(0.0), grid=Grid(16))
        x = grid_fn(problem.grid, np.linspace(0.0, 2.0, 17))
        assert apply_operator(problem, x).sup_norm == 0.0

    def test_constant_source_closed_form(self):
        beta, k, c = 1.5, 0.5, 0.7
        problem = FbvpProblem(beta=beta, k=k, L=0.0, f=constant_source(c), grid=Grid(64))
        x = grid_fn(problem.grid, np.linspace(0.0, 1.3, 65))
        got = apply_operator(problem, x)
        t = problem.grid.nodes
        want = c * (
            t**beta / gamma_fn(beta + 1.0)
            + 2.0 * t / ((2.0 + k * k) * gamma_fn(beta + 1.0))
            + 2.0 * t * k ** (beta + 1.0) / ((2.0 + k * k) * gamma_fn(beta + 2.0))
        )
        assert np.max(np.abs(got.values - want)) <= 1e-10

    def test_result_independent_of_input_for_constant_source(self):
        problem = FbvpProblem(beta=1.2, k=0.25, L=0.0, f=constant_source(1.0), grid=Grid(32))
        a = apply_operator(problem, zero_grid_fn(problem.grid))
        b = apply_operator(problem, grid_fn(problem.grid, np.full(33, 1.7)))
        assert np.array_equal(a.values, b.values)

    def test_origin_pinned_to_zero(self):
        problem = FbvpProblem(beta=1.5, k=0.5, L=0.2, f=sine_mix_source(0.2), grid=Grid(32))
        x = grid_fn(problem.grid, np.linspace(0.0, 1.0, 33))
        assert apply_operator(problem, x).values[0] == 0.0

    def test_monotone_in_source(self):
        g = Grid(32)
        low = FbvpProblem(beta=1.5, k=0.5, L=0.0, f=constant_source(0.5), grid=g)
        high = FbvpProblem(beta=1.5, k=0.5, L=0.0, f=constant_source(1.5), grid=g)
        x = zero_grid_fn(g)
        assert np.all(
            apply_operator(low, x).values <= apply_operator(high, x).values + 1e-15
        )

    def test_nonnegative_cone_preserved(self):
        problem = FbvpProblem(beta=1.5, k=0.5, L=0.2, f=sine_mix_source(0.2), grid=Grid(32))
        rng = np.random.default_rng(5)
        for _ in range(4):
            x = grid_fn(problem.grid, rng.uniform(0.0, 2.0, 33))
            assert np.all(apply_operator(problem, x).values >= 0.0)

    def test_grid_mismatch_rejected(self):
        problem = FbvpProblem(beta=1.5, k=0.5, L=0.0, f=constant_source(1.0), grid=Grid(16))
        with pytest.raises(ShapeError):
            apply_operator(problem, zero_grid_fn(Grid(8)))

    def test_discrete_lipschitz_bound(self):
        problem = FbvpProblem(beta=1.5, k=0.5, L=0.2, f=sine_mix_source(0.2), grid=Grid(64))
        bound = problem.L * lambda_tight(1.5, 0.5) + 10.0 / 64.0
        rng = np.random.default_rng(9)
        for _ in range(5):
            x = grid_fn(problem.grid, rng.uniform(0.0, 2.0, 65))
            y = grid_fn(problem.grid, rng.uniform(0.0, 2.0, 65))
            tx = apply_operator(problem, x)
            ty = apply_operator(problem, y)
            lhs = np.max(np.abs(tx.values - ty.values))
            rhs = bound * np.max(np.abs(x.values - y.values))
            assert lhs <= rhs + 1e-12


class TestProblemValidation:
    def test_order_bounds(self):
        with pytest.raises(DomainError):
            FbvpProblem(beta=2.5, k=0.5, L=0.0, f=constant_source(1.0), grid=Grid(8))
        with pytest.raises(DomainError):
            FbvpProblem(beta=1.5, k=0.0, L=0.0, f=constant_source(1.0), grid=Grid(8))

    def test_negative_source_rejected(self):
        def negative(t, x):
            return -1.0 + 0.0 * np.asarray(t, dtype=float)

        with pytest.raises(DomainError):
            FbvpProblem(beta=1.5, k=0.5, L=0.0, f=negative, grid=Grid(8))

    def test_understated_lipschitz_constant_rejected(self):
        with pytest.raises(DomainError):
            FbvpProblem(beta=1.5, k=0.5, L=0.1, f=affine_source(2.0), grid=Grid(8))

    def test_k_snap_reported(self):
        problem = FbvpProblem(beta=1.5, k=0.33, L=0.0, f=constant_source(1.0), grid=Grid(8))
        assert problem.k_used == 0.375
        assert problem.k_snap_distance == pytest.approx(0.045, abs=1e-12)


class TestSolve:
    def test_constant_source_converges_in_two_steps(self):
        problem = FbvpProblem(beta=1.5, k=0.5, L=0.0, f=constant_source(1.0), grid=Grid(64))
        solution = solve_fbvp(problem, tol=1e-12)
        assert solution.iterations == 2
        assert solution.fixed_point_residual <= 1e-12
        assert solution.x.values[0] == 0.0

    def test_gap_ratio_below_contraction_bound(self):
        problem = FbvpProblem(beta=1.5, k=0.5, L=0.2, f=sine_mix_source(0.2), grid=Grid(64))
        solution = solve_fbvp(problem, tol=1e-10)
        assert solution.gap_ratio <= problem.L * solution.lambda_tight + 0.02

    def test_negative_start_rejected(self):
        problem = FbvpProblem(beta=1.5, k=0.5, L=0.0, f=constant_source(1.0), grid=Grid(16))
        bad = grid_fn(problem.grid, np.linspace(-0.1, 1.0, 17))
        with pytest.raises(PreconditionError):
            solve_fbvp(problem, x0=bad)

    def test_supercritical_constant_warns_before_iterating(self):
        problem = FbvpProblem(beta=1.5, k=0.5, L=2.0, f=affine_source(2.0), grid=Grid(16))
        with pytest.warns(ContractionWarning):
            solution = solve_fbvp(problem, tol=1e-8, max_iter=300)
        assert solution.warning is not None

    def test_two_grid_solution_consistency(self):
        sols = {}
        for n in (128, 256, 512):
            problem = FbvpProblem(
                beta=1.5, k=0.5, L=0.2, f=sine_mix_source(0.2), grid=Grid(n)
            )
            sols[n] = solve_fbvp(problem, tol=1e-10).x.values
        coarse_gap = np.max(np.abs(sols[128] - sols[256][::2]))
        fine_gap = np.max(np.abs(sols[256] - sols[512][::2]))
        assert coarse_gap <= 4.0 * fine_gap + 1e-9

    def test_caputo_residual_decays_at_fixed_interior_times(self):
        residuals = {}
        for n in (64, 128, 256):
            problem = FbvpProblem(
                beta=1.5, k=0.5, L=0.0, f=constant_source(1.0), grid=Grid(n)
            )
            x = solve_fbvp(problem, tol=1e-12).x
            cd = caputo_derivative_nodes(x, 1.5)
            fv = constant_source(1.0)(problem.grid.nodes, x.values)
            residuals[n] = {
                frac: abs(float(cd[int(frac * n)] - fv[int(frac * n)]))
                for frac in (0.25, 0.5, 0.75)
            }
        for frac in (0.25, 0.5, 0.75):
            assert residuals[128][frac] <= residuals[64][frac] / 1.2
            assert residuals[256][frac] <= residuals[128][frac] / 1.2

    def test_boundary_identity_for_corrected_variant(self):
        # the subtracted-coupling variant satisfies the integral boundary
        # condition up to quadrature error in the reported residual
        problem = FbvpProblem(
            beta=1.5, k=0.5, L=0.2, f=sine_mix_source(0.2), grid=Grid(128),
            variant=OperatorVariant.GREEN_CORRECTED,
        )
        solution = solve_fbvp(problem, tol=1e-10)
        assert solution.boundary_residual <= 1e-4
        exact_variant = FbvpProblem(
            beta=1.5, k=0.5, L=0.2, f=sine_mix_source(0.2), grid=Grid(128)
        )
        exact_solution = solve_fbvp(exact_variant, tol=1e-10)
        assert exact_solution.boundary_residual > 0.1

    def test_solution_record_is_plain_data(self):
        problem = FbvpProblem(beta=1.5, k=0.5, L=0.0, f=constant_source(1.0), grid=Grid(32))
        record = solve_fbvp(problem).to_record()
        assert record["stop_reason"] == "converged"
        assert isinstance(record["caputo_residual"], float)

    def test_uniqueness_probe_accepts_zero_function_ancestor(self):
        from relfix import UniquenessVerdict, probe_uniqueness, sample_space
        from relfix.fixtures import fbvp_fixture

        problem = FbvpProblem(beta=1.5, k=0.5, L=0.2, f=sine_mix_source(0.2), grid=Grid(64))
        fx = fbvp_fixture(problem)
        solution = solve_fbvp(problem, tol=1e-10)
        sample = sample_space(fx.space, count=4, seed=3)
        result = probe_uniqueness(
            fx.relation, fx.map, fx.wdistance, problem.L * solution.lambda_tight,
            [solution.x], sample, z_hint=fx.z_hint, decay_tol=1e-8,
        )
        assert result.verdict is UniquenessVerdict.UNIQUE_BY_CONDITION_1
        assert result.z.sup_norm == 0.0
