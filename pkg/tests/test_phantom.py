"""Phantom shapes, delta tables, and rendering."""
import numpy as np
import pytest

from phasect import (Circle, Material, PhantomError, PhantomSpec, Ring,
                     default_delta_table, default_phantom_spec, render_phantom)

UNIFORM_TABLE = {m: 1e-5 for m in Material}


class TestDeltaTable:
    def test_8_kev_entries_positive_and_distinct(self):
        table = default_delta_table(8.0)
        values = [table[m] for m in Material]
        assert all(v > 0 for v in values)
        assert len(set(values)) == len(values)

    def test_8_kev_entries_in_soft_material_range(self):
        assert all(1e-7 < v < 1e-4 for v in default_delta_table(8.0).values())

    def test_energy_out_of_range_rejected(self):
        for energy in (4.0, 31.0):
            with pytest.raises(PhantomError):
                default_delta_table(energy)

    def test_untabulated_energy_directs_to_custom_table(self):
        with pytest.raises(PhantomError, match="delta_table"):
            default_delta_table(12.0)

    def test_custom_table_passes_through(self):
        spec = PhantomSpec(
            shapes=(Circle(40.0, 40.0, 20.0, Material.POLYSTYRENE),),
            delta_table={**UNIFORM_TABLE, Material.POLYSTYRENE: 4e-6})
        img = render_phantom(spec, n=100, pixel_size_nm=10.0)
        assert img.data[40, 40] == 4e-6

    def test_table_values_validated(self):
        with pytest.raises(PhantomError):
            PhantomSpec(shapes=(), delta_table={Material.PROTEIN: 2e-4})


class TestRenderPhantom:
    def test_empty_spec_renders_zeros(self):
        img = render_phantom(PhantomSpec(shapes=(), delta_table=UNIFORM_TABLE),
                             n=512, pixel_size_nm=10.0)
        assert img.data.shape == (512, 512)
        assert not img.data.any()

    def test_circle_membership(self):
        spec = PhantomSpec(
            shapes=(Circle(256.0, 256.0, 100.0, Material.POLYSTYRENE),),
            delta_table=UNIFORM_TABLE)
        img = render_phantom(spec, n=512, pixel_size_nm=10.0)
        assert img.data[256, 256] == 1e-5
        assert img.data[10, 10] == 0.0

    def test_default_spec_max_equals_largest_table_delta(self):
        table = default_delta_table(8.0)
        img = render_phantom(default_phantom_spec(), n=512,
                             pixel_size_nm=10.0)
        assert img.data.max() == max(table.values())

    def test_default_spec_uses_all_three_materials(self):
        table = default_delta_table(8.0)
        img = render_phantom(default_phantom_spec(), n=512,
                             pixel_size_nm=10.0)
        present = set(np.unique(img.data)) - {0.0}
        assert present == set(table.values())

    def test_rendering_is_deterministic(self):
        a = render_phantom(default_phantom_spec(), n=512, pixel_size_nm=10.0)
        b = render_phantom(default_phantom_spec(), n=512, pixel_size_nm=10.0)
        assert np.array_equal(a.data, b.data)

    def test_delta_map_is_nonnegative(self):
        img = render_phantom(default_phantom_spec(), n=512,
                             pixel_size_nm=10.0)
        assert img.data.min() >= 0.0

    def test_ring_is_hollow(self):
        spec = PhantomSpec(
            shapes=(Ring(64.0, 64.0, 10.0, 20.0, Material.PROTEIN),),
            delta_table=UNIFORM_TABLE)
        img = render_phantom(spec, n=128, pixel_size_nm=10.0)
        assert img.data[64, 64] == 0.0          # center = background
        assert img.data[64, 64 + 15] == 1e-5    # annulus body

    def test_overlap_resolves_last_drawn_wins(self):
        spec = PhantomSpec(
            shapes=(Circle(64.0, 64.0, 20.0, Material.PROTEIN),
                    Circle(64.0, 64.0, 10.0, Material.LUNG_TISSUE)),
            delta_table={**UNIFORM_TABLE, Material.PROTEIN: 2e-5})
        img = render_phantom(spec, n=128, pixel_size_nm=10.0)
        assert img.data[64, 64] == 1e-5    # later lung-tissue disk wins
        assert img.data[64, 64 + 15] == 2e-5

    def test_out_of_bounds_shape_rejected(self):
        spec = PhantomSpec(
            shapes=(Circle(5.0, 5.0, 20.0, Material.PROTEIN),),
            delta_table=UNIFORM_TABLE)
        with pytest.raises(PhantomError):
            render_phantom(spec, n=128, pixel_size_nm=10.0)

    def test_binary_membership_no_antialiasing(self):
        spec = PhantomSpec(
            shapes=(Circle(64.0, 64.0, 20.3, Material.PROTEIN),),
            delta_table=UNIFORM_TABLE)
        img = render_phantom(spec, n=128, pixel_size_nm=10.0)
        assert set(np.unique(img.data)) == {0.0, 1e-5}
