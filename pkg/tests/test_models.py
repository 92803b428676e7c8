"""Tests for mfnnmc.models: manufactured solutions, solvers and the catalog."""

import numpy as np
import pytest

from mfnnmc.design import draw_mc_samples
from mfnnmc.exceptions import ConfigurationError, InputError
from mfnnmc.models import (
    BiFidelitySpec,
    ModelId,
    OdeSpec,
    WaveSpec,
    get_model,
    ode_exact,
    ode_qoi,
    ode_qoi_exact,
    ode_solve_rk2,
    wave_exact,
    wave_grid,
    wave_qoi,
    wave_qoi_exact,
    wave_solve_fd,
    wave_solve_field,
)
from mfnnmc.models.ode import ode_step_count
from mfnnmc.validation import (
    ORDER_BOUNDS,
    check_ode_order,
    check_ode_residual,
    check_wave_order,
    check_wave_residual,
)


class TestOde:
    """Decay ODE with manufactured solution."""

    def test_initial_condition(self):
        """u(0, y) = 0.5 + 2 sin(12 y)."""
        y = np.array([-0.7, 0.0, 0.3])

        assert np.allclose(ode_exact(0.0, y), 0.5 + 2.0 * np.sin(12.0 * y))

    def test_qoi_exact_at_zero(self):
        """Q(0) = |u(100, 0)| = 0.5."""
        assert ode_qoi_exact(0.0) == pytest.approx(0.5)

    def test_forcing_reproduces_equation(self):
        """u_t + 0.5 u - f vanishes for the closed form."""
        result = check_ode_residual()

        assert result.passed, result.detail

    def test_second_order_convergence(self):
        """Observed order of the midpoint RK2 solver lies in [1.7, 2.3]."""
        result = check_ode_order()

        assert result.passed, result.detail
        lo, hi = ORDER_BOUNDS
        assert lo <= result.detail["order"] <= hi

    def test_halving_step_quarters_error(self):
        """At y = 0.7 the QoI error ratio between h = 0.1 and h = 0.05 lies in [3.5, 4.5]."""
        exact = ode_qoi_exact(0.7)

        ratio = abs(ode_qoi(0.7, 0.1) - exact) / abs(ode_qoi(0.7, 0.05) - exact)

        assert 3.5 <= ratio <= 4.5

    def test_steady_parameter_is_solved_exactly(self):
        """At y = 0 the solution stays at 0.5, so every step size returns Q = 0.5."""
        for h in (0.5, 0.1, 0.01):
            assert ode_qoi(0.0, h) == pytest.approx(0.5, abs=1e-12)

    def test_fine_step_is_accurate(self):
        """At h = 0.01 the QoI is within 1e-3 of the exact value."""
        y = np.linspace(-1.0, 1.0, 11)

        assert np.max(np.abs(ode_qoi(y, 0.01) - ode_qoi_exact(y))) < 1e-3

    def test_scalar_in_scalar_out(self):
        """A scalar parameter gives a scalar solution."""
        value = ode_solve_rk2(0.2, 0.1)

        assert np.ndim(value) == 0

    def test_vectorized_matches_pointwise(self):
        """Solving a vector of parameters equals solving each one."""
        y = np.array([-0.9, -0.1, 0.4, 0.95])

        batch = ode_solve_rk2(y, 0.1)

        for i, yi in enumerate(y):
            assert batch[i] == pytest.approx(ode_solve_rk2(yi, 0.1), abs=1e-14)

    def test_step_aligned_to_horizon(self):
        """A step that does not divide T is shrunk so the horizon is hit exactly."""
        n, dt = ode_step_count(0.3)

        assert n == 333
        assert n * dt == pytest.approx(100.0)

    def test_nonpositive_step_rejected(self):
        """h <= 0 is an InputError."""
        with pytest.raises(InputError):
            ode_solve_rk2(0.0, 0.0)

    def test_invalid_spec_rejected(self):
        """A non-positive horizon is rejected."""
        with pytest.raises(InputError):
            OdeSpec(horizon=0.0)


class TestWave:
    """2D wave equation with manufactured solution."""

    def test_exact_solution_is_separable(self):
        """u = sin(y1 t - y2 x1) sin(y2 x2)."""
        value = wave_exact(1.5, (0.2, -0.3), (10.5, 5.0))

        assert value == pytest.approx(np.sin(10.5 * 1.5 - 5.0 * 0.2) * np.sin(5.0 * -0.3))

    def test_forcing_reproduces_equation(self):
        """u_tt - Δu - f vanishes for the closed form."""
        result = check_wave_residual()

        assert result.passed, result.detail

    def test_grid_geometry(self):
        """h = 1/20 gives 41 nodes, x_Q at index (30, 30) and 1200 steps to T = 30."""
        grid = wave_grid(1 / 20)

        assert grid.n == 40
        assert grid.x[0] == pytest.approx(-1.0) and grid.x[-1] == pytest.approx(1.0)
        assert grid.x[20] == 0.0
        assert grid.probe_index == (30, 30)
        assert grid.steps == 1200

    def test_grid_misaligned_with_origin(self):
        """1/h not integral puts the origin off-grid."""
        with pytest.raises(InputError):
            wave_grid(0.3)

    def test_probe_off_grid(self):
        """h = 1/3 aligns the origin but not x_Q = (0.5, 0.5)."""
        with pytest.raises(InputError):
            wave_grid(1 / 3)

    @pytest.mark.slow
    def test_second_order_convergence(self):
        """Mean observed order on the two finest campaign grids at T = 30 lies in [1.7, 2.3]."""
        result = check_wave_order()

        assert result.passed, result.detail
        assert result.detail["horizon"] == 30.0

    def test_campaign_grid_accuracy(self):
        """At y = (10.5, 5) and h = 1/32 the QoI is within 0.05 of the exact value."""
        y = np.array([10.5, 5.0])

        assert abs(wave_qoi(y, 1 / 32) - wave_qoi_exact(y)) < 0.05

    def test_error_drops_with_step(self):
        """Halving h from 1/16 to 1/32 shrinks the error at x_Q at least threefold."""
        y = np.array([10.5, 5.0])
        exact = wave_qoi_exact(y)

        ratio = abs(wave_qoi(y, 1 / 16) - exact) / abs(wave_qoi(y, 1 / 32) - exact)

        assert ratio >= 3.0

    def test_zero_row_stays_zero(self):
        """sin(y2 x2) vanishes at x2 = 0, so the computed field does too."""
        grid, field = wave_solve_field(np.array([[10.5, 5.0], [10.1, 4.3]]), 1 / 32)

        assert grid.x[grid.n // 2] == 0.0
        assert np.max(np.abs(field[:, :, grid.n // 2])) < 1e-12

    def test_short_horizon_accuracy(self):
        """Over a short horizon the probe value is close to the exact one."""
        spec = WaveSpec(horizon=0.25)
        y = np.array([[10.2, 4.5], [10.9, 5.8]])

        approx = wave_solve_fd(y, 1 / 64, spec)
        exact = wave_exact(0.25, spec.probe, (y[:, 0], y[:, 1]))

        assert np.max(np.abs(approx - exact)) < 2e-2

    def test_batch_matches_single(self):
        """Batched solves agree with one-at-a-time solves."""
        spec = WaveSpec(horizon=0.5)
        y = np.array([[10.1, 4.2], [10.7, 5.5], [10.4, 4.9]])

        batch = wave_solve_fd(y, 1 / 20, spec)

        for i in range(3):
            assert batch[i] == pytest.approx(wave_solve_fd(y[i], 1 / 20, spec), abs=1e-13)

    def test_qoi_exact_nonnegative(self):
        """Q = |u(T, x_Q, y)| is nonnegative."""
        y = np.array([[10.0, 4.0], [11.0, 6.0], [10.5, 5.0]])

        assert np.all(wave_qoi_exact(y) >= 0.0)

    def test_bad_parameter_shape(self):
        """Parameters must come in (y1, y2) pairs."""
        with pytest.raises(InputError):
            wave_solve_fd(np.zeros((2, 3)), 1 / 20)


class TestCatalog:
    """Model catalog and bi-fidelity specs."""

    def test_catalog_entries(self):
        """Both built-in models are registered with their dimension and order."""
        ode = get_model("ode15")
        wave = get_model(ModelId.WAVE16)

        assert (ode.dim, ode.order_q, ode.gamma) == (1, 2.0, 1.0)
        assert (wave.dim, wave.order_q, wave.gamma) == (2, 2.0, 3.0)
        assert list(ode.h_ladder) == sorted(ode.h_ladder, reverse=True)

    def test_unknown_model(self):
        """An unknown id is an InputError listing the known ids."""
        with pytest.raises(InputError) as exc_info:
            get_model("heat3d")

        assert "ode15" in exc_info.value.details["known"]

    def test_ladder_points_are_admissible(self):
        """Every ladder point passes the model's h check."""
        for model_id in ModelId:
            model = get_model(model_id)
            for h in model.h_ladder:
                model.check_h(h)

    def test_bifidelity_evaluates_both_levels(self):
        """q_lf and q_hf use the two step sizes."""
        spec = BiFidelitySpec(h_lf=0.5, h_hf=0.1, model_id="ode15")
        y = np.array([[0.1], [0.6]])

        assert np.allclose(spec.q_lf(y), ode_qoi(y[:, 0], 0.5))
        assert np.allclose(spec.q_hf(y), ode_qoi(y[:, 0], 0.1))

    def test_hf_coarser_than_lf_rejected(self):
        """h_HF > h_LF is a ConfigurationError."""
        with pytest.raises(ConfigurationError):
            BiFidelitySpec(h_lf=0.1, h_hf=0.5, model_id="ode15")

    def test_equal_fidelities_allowed(self, caplog):
        """h_HF = h_LF is accepted with a warning."""
        spec = BiFidelitySpec(h_lf=0.1, h_hf=0.1, model_id="ode15")

        assert spec.h_hf == spec.h_lf
        assert "coincide" in caplog.text

    def test_ode_fidelities_are_correlated(self):
        """Q_LF and Q_HF of the ODE row are positively correlated over 200 draws."""
        spec = BiFidelitySpec(h_lf=0.5, h_hf=0.1, model_id="ode15")
        y = draw_mc_samples(200, spec.model.domain, 12)

        assert np.corrcoef(spec.q_lf(y), spec.q_hf(y))[0, 1] > 0.0

    @pytest.mark.slow
    def test_wave_fidelities_are_correlated(self):
        """Q_LF and Q_HF of the wave row are positively correlated over 200 draws."""
        spec = BiFidelitySpec(h_lf=0.05, h_hf=0.03125, model_id="wave16")
        y = draw_mc_samples(200, spec.model.domain, 13)

        assert np.corrcoef(spec.q_lf(y), spec.q_hf(y))[0, 1] > 0.0
