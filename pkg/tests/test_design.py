"""Tests for mfnnmc.design: training designs, scaling and random streams."""

import numpy as np
import pytest

from mfnnmc.design import (
    PHASE_OFFSETS,
    SampleDesign,
    ScalingTransform,
    all_high_fidelity,
    apply_scaling,
    build_design_1d,
    build_design_2d,
    derive_seed,
    draw_mc_samples,
)
from mfnnmc.exceptions import ConfigurationError, InputError


class TestDesign1d:
    """Equispaced designs on an interval."""

    def test_241_points_split(self, ode_design):
        """M = 241 gives M_1 = 61 and M_2 = 180."""
        assert ode_design.m == 241
        assert ode_design.m1 == 61
        assert ode_design.m2 == 180
        assert 0.2 <= ode_design.ratio <= 0.3

    def test_every_fourth_point_in_first_set(self, ode_design):
        """Y_I holds indices 0, 4, 8, ... including both endpoints."""
        idx = np.nonzero(ode_design.in_first)[0]

        assert np.array_equal(idx, np.arange(0, 241, 4))
        assert ode_design.y_I[0, 0] == -1.0
        assert ode_design.y_I[-1, 0] == 1.0

    def test_sets_are_disjoint_and_cover(self, small_ode_design):
        """Y_I and Y_II partition the design points."""
        both = np.concatenate([small_ode_design.y_I, small_ode_design.y_II])

        assert both.shape[0] == small_ode_design.m
        assert np.array_equal(np.sort(both[:, 0]), np.sort(small_ode_design.points[:, 0]))

    def test_too_few_points(self):
        """M < 5 is a ConfigurationError on field M."""
        with pytest.raises(ConfigurationError) as exc_info:
            build_design_1d(4, [-1.0, 1.0])

        assert exc_info.value.errors[0]["field"] == "M"

    def test_ratio_outside_bounds_warns(self, caplog):
        """M = 5 gives r = 0.4 and a warning, not an error."""
        design = build_design_1d(5, [-1.0, 1.0])

        assert design.m1 == 2
        assert "outside" in caplog.text

    def test_csv_round_trip(self, small_ode_design, tmp_path):
        """to_csv/from_csv preserve points and set membership."""
        path = small_ode_design.to_csv(tmp_path / "design.csv")

        loaded = SampleDesign.from_csv(path, [-1.0, 1.0])

        assert np.array_equal(loaded.points, small_ode_design.points)
        assert np.array_equal(loaded.in_first, small_ode_design.in_first)

    def test_csv_columns(self, small_ode_design, tmp_path):
        """The design CSV has columns index, y1, set."""
        path = small_ode_design.to_csv(tmp_path / "design.csv")

        header = path.read_text().splitlines()[0]

        assert header == "index,y1,set"


class TestDesign2d:
    """Tensor-grid designs on a rectangle."""

    @pytest.mark.parametrize(
        "grid,m1,m2",
        [((31, 105), 848, 2407), ((41, 121), 1281, 3680)],
    )
    def test_wave_grid_counts(self, grid, m1, m2):
        """The bundled wave-equation grids give these M_1 / M_2 splits."""
        design = build_design_2d(*grid, [[10.0, 11.0], [4.0, 6.0]])

        assert (design.m1, design.m2) == (m1, m2)

    def test_first_set_has_even_indices(self, small_wave_design):
        """A point is in Y_I iff both grid indices are even."""
        g1 = np.linspace(10.0, 11.0, 5)
        g2 = np.linspace(4.0, 6.0, 9)
        expected = {(g1[i], g2[j]) for i in range(0, 5, 2) for j in range(0, 9, 2)}

        assert {tuple(p) for p in small_wave_design.y_I} == expected

    def test_degenerate_grid(self):
        """A grid dimension below 3 is rejected."""
        with pytest.raises(ConfigurationError):
            build_design_2d(2, 10, [[10.0, 11.0], [4.0, 6.0]])

    def test_dimension_mismatch(self):
        """A 1D domain cannot carry a 2D design."""
        with pytest.raises(ConfigurationError):
            build_design_2d(5, 5, [-1.0, 1.0])

    def test_all_high_fidelity(self, small_wave_design):
        """all_high_fidelity moves every point into Y_I."""
        design = all_high_fidelity(small_wave_design)

        assert design.m2 == 0
        assert design.m1 == small_wave_design.m
        assert np.array_equal(design.points, small_wave_design.points)


class TestScaling:
    """Affine maps onto the unit cube."""

    def test_domain_corners_map_to_unit_cube(self):
        """Domain corners map to 0 and 1 per dimension."""
        t = ScalingTransform.from_domain([[10.0, 11.0], [4.0, 6.0]])

        z = apply_scaling(t, np.array([[10.0, 4.0], [11.0, 6.0], [10.5, 5.0]]))

        assert np.allclose(z, [[0.0, 0.0], [1.0, 1.0], [0.5, 0.5]])

    def test_inverse(self):
        """inverse undoes apply."""
        t = ScalingTransform.from_domain([-1.0, 1.0])
        y = np.array([[-0.3], [0.8]])

        assert np.allclose(t.inverse(t.apply(y)), y)

    def test_constant_values_get_unit_scale(self):
        """Min/max scaling of constant values does not divide by zero."""
        t = ScalingTransform.from_values(np.full(4, 2.5))

        assert np.all(t.scale == 1.0)
        assert np.allclose(t.apply(np.full((4, 1), 2.5)), 0.0)

    def test_invalid_domain(self):
        """lo >= hi is an InputError."""
        with pytest.raises(InputError):
            ScalingTransform.from_domain([1.0, -1.0])

    def test_dict_round_trip(self):
        """to_dict/from_dict preserve offset and scale."""
        t = ScalingTransform.from_domain([[10.0, 11.0], [4.0, 6.0]])

        back = ScalingTransform.from_dict(t.to_dict())

        assert np.array_equal(back.offset, t.offset)
        assert np.array_equal(back.scale, t.scale)


class TestRandomStreams:
    """Seed derivation and Monte Carlo draws."""

    def test_phase_seeds_are_distinct(self):
        """Every phase of one master seed gets its own sub-seed."""
        seeds = [derive_seed(3, phase) for phase in PHASE_OFFSETS]

        assert len(set(seeds)) == len(seeds)

    def test_phase_seeds_do_not_collide_across_masters(self):
        """Sub-seeds of consecutive master seeds never overlap."""
        a = {derive_seed(3, p) for p in PHASE_OFFSETS}
        b = {derive_seed(4, p) for p in PHASE_OFFSETS}

        assert not a & b

    def test_unknown_phase(self):
        """An unknown phase name is an InputError."""
        with pytest.raises(InputError):
            derive_seed(0, "warmup")

    def test_draws_are_reproducible_and_in_domain(self):
        """The same seed gives identical draws inside the rectangle."""
        domain = [[10.0, 11.0], [4.0, 6.0]]

        a = draw_mc_samples(1000, domain, 42)
        b = draw_mc_samples(1000, domain, 42)

        assert a.shape == (1000, 2)
        assert np.array_equal(a, b)
        assert np.all((a[:, 0] >= 10.0) & (a[:, 0] <= 11.0))
        assert np.all((a[:, 1] >= 4.0) & (a[:, 1] <= 6.0))

    def test_draws_are_roughly_uniform(self):
        """The sample mean of U[-1, 1] draws is near zero."""
        y = draw_mc_samples(100_000, [-1.0, 1.0], 1)

        assert abs(y.mean()) < 0.01

    def test_zero_samples_rejected(self):
        """N < 1 is an InputError."""
        with pytest.raises(InputError):
            draw_mc_samples(0, [-1.0, 1.0], 0)
