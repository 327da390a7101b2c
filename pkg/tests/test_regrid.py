"""Tests for bilinear interpolation between lat/lon grids."""

import numpy as np
import pytest

from geoverify import FieldCube, GridSpec, VariableCatalog, VariableId, bilinear_upsample
from geoverify.errors import OutOfExtent
from conftest import utc


def _cube_on(spec, field):
    catalog = VariableCatalog([VariableId("T2M")])
    return FieldCube(spec, catalog, utc(2024, 2, 2, 18), np.asarray(field, np.float32)[None])


COARSE = GridSpec(20, 40, 50.0, -1.5, 100.0, 1.5)          # 1.5 degree regional
FINE = GridSpec(109, 229, 49.0, -0.25, 101.0, 0.25)        # 0.25 degree inside it


class TestBilinearUpsample:
    def test_constant_field_stays_constant(self):
        cube = _cube_on(COARSE, np.full((20, 40), 287.5))
        out = bilinear_upsample(cube, FINE)
        np.testing.assert_array_equal(out.values, np.float32(287.5))

    def test_linear_field_reproduced(self):
        """Bilinear interpolation is exact on fields linear in lat and lon."""
        lats, lons = COARSE.latitudes, COARSE.longitudes
        field = 2.0 * lats[:, None] + 0.5 * lons[None, :] + 3.0
        cube = _cube_on(COARSE, field)
        out = bilinear_upsample(cube, FINE)
        t_lats, t_lons = FINE.latitudes, FINE.longitudes
        expected = 2.0 * t_lats[:, None] + 0.5 * t_lons[None, :] + 3.0
        np.testing.assert_allclose(out.values[0], expected, rtol=1e-6)

    def test_cell_center_blends_four_corners(self):
        spec = GridSpec(2, 2, 1.0, -1.0, 0.0, 1.0)
        cube = _cube_on(spec, [[0.0, 2.0], [4.0, 6.0]])
        target = GridSpec(2, 2, 1.0, -0.5, 0.25, 0.5)
        out = bilinear_upsample(cube, target)
        center = bilinear_upsample(cube, GridSpec(2, 2, 0.5, -0.5, 0.5, 0.5))
        assert center.values[0, 0, 0] == 3.0
        assert out.values[0, 0, 0] == pytest.approx((0.0 * 0.75 + 2.0 * 0.25), rel=1e-6)

    def test_idempotent_on_matching_grid(self):
        rng = np.random.default_rng(20)
        cube = _cube_on(COARSE, rng.normal(size=(20, 40)))
        out = bilinear_upsample(cube, COARSE)
        np.testing.assert_array_equal(out.values, cube.values)

    def test_output_within_source_hull(self):
        rng = np.random.default_rng(21)
        cube = _cube_on(COARSE, rng.normal(size=(20, 40)))
        out = bilinear_upsample(cube, FINE)
        assert out.values.max() <= cube.values.max()
        assert out.values.min() >= cube.values.min()

    def test_regional_source_refuses_extrapolation(self):
        cube = _cube_on(COARSE, np.zeros((20, 40)))
        beyond = GridSpec(4, 4, 55.0, -0.5, 101.0, 0.25)
        with pytest.raises(OutOfExtent):
            bilinear_upsample(cube, beyond)
        east = GridSpec(4, 4, 49.0, -0.5, 159.0, 1.0)
        with pytest.raises(OutOfExtent):
            bilinear_upsample(cube, east)

    def test_global_source_wraps_longitude(self):
        spec = GridSpec(3, 4, 45.0, -45.0, 0.0, 90.0)
        field = np.array([[0.0, 10.0, 20.0, 30.0]] * 3)
        cube = _cube_on(spec, field)
        target = GridSpec(3, 1, 45.0, -45.0, 315.0, 45.0)
        out = bilinear_upsample(cube, target)
        np.testing.assert_allclose(out.values[:, :, 0], 15.0, rtol=1e-6)

    def test_global_source_clamps_pole_rows(self):
        spec = GridSpec(3, 4, 60.0, -60.0, 0.0, 90.0)
        field = np.array([[1.0] * 4, [2.0] * 4, [3.0] * 4])
        cube = _cube_on(spec, field)
        target = GridSpec(2, 4, 90.0, -180.0, 0.0, 90.0)
        out = bilinear_upsample(cube, target)
        np.testing.assert_array_equal(out.values[0, 0], 1.0)
        np.testing.assert_array_equal(out.values[0, 1], 3.0)

    def test_channels_processed_independently(self):
        catalog = VariableCatalog([VariableId("T2M"), VariableId("WS10M")])
        values = np.stack([np.full((20, 40), 1.0), np.full((20, 40), 2.0)]).astype(np.float32)
        cube = FieldCube(COARSE, catalog, utc(2024, 1, 1), values)
        out = bilinear_upsample(cube, FINE)
        np.testing.assert_array_equal(out.values[0], 1.0)
        np.testing.assert_array_equal(out.values[1], 2.0)
