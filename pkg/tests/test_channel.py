import numpy as np
import pytest

from thzris import AbsorptionModel, build_channel_set, free_space_amplitude, steering, \
    synthesize_link
from thzris.channel import C_LIGHT, complex_normal

from conftest import make_system, random_geometry

F = 220e9


class TestSteering:
    def test_broadside_all_ones(self):
        assert steering(4, 0.0) == pytest.approx(np.ones(4))

    def test_endfire_alternates_sign(self):
        assert steering(2, np.pi / 2, 0.5) == pytest.approx(np.array([1.0, -1.0]))

    def test_30_degrees_quarter_turns(self):
        # sin 30 deg = 1/2 with half-wavelength spacing: phase step pi/2
        expected = np.array([1.0, 1.0j, -1.0, -1.0j])
        assert steering(4, np.pi / 6, 0.5) == pytest.approx(expected, abs=1e-12)

    def test_unit_modulus_and_leading_one(self, rng):
        for _ in range(20):
            vec = steering(int(rng.integers(1, 40)), float(rng.uniform(-1.5, 1.5)),
                           float(rng.uniform(0.1, 1.0)))
            assert vec[0] == 1.0
            assert np.abs(vec) == pytest.approx(np.ones(vec.size))


class TestSynthesizeLink:
    def test_deterministic_when_noise_becomes_additive(self, rng):
        # zeta = 1: the scattered term vanishes regardless of tau
        model = AbsorptionModel.constant(0.3)
        los = steering(5, 0.4)
        d = 2.0
        tau = np.exp(-0.3 * d)
        expected = np.sqrt(tau) * los * free_space_amplitude(F, d)
        out = synthesize_link(los, d, F, 1, model, rng)
        assert out == pytest.approx(expected, rel=1e-12)

    def test_amplitude_scale(self):
        # c/(4 pi f d) at 220 GHz and 1 m
        expected = C_LIGHT / (4.0 * np.pi * 220e9 * 1.0)
        assert free_space_amplitude(220e9, 1.0) == pytest.approx(expected, rel=1e-12)
        assert free_space_amplitude(220e9, 1.0) == pytest.approx(1.0844e-4, rel=1e-3)

    def test_pure_rayleigh_when_fully_absorbed(self, rng):
        # tau -> 0 with zeta = 0: zero-mean entries with pathloss^2 variance
        model = AbsorptionModel.constant(50.0)
        los = np.ones(100_000, dtype=complex)
        d = 1.0
        out = synthesize_link(los, d, F, 0, model, rng)
        pl = free_space_amplitude(F, d)
        assert np.mean(np.abs(out) ** 2) == pytest.approx(pl**2, rel=0.02)
        assert np.abs(np.mean(out)) < 3 * pl / np.sqrt(len(los))

    def test_mean_entry_power_is_pathloss_squared(self, rng):
        # zeta = 0: LOS fraction tau plus NLOS fraction (1 - tau) sum to one
        model = AbsorptionModel.constant(0.7)
        los = steering(4, 0.3)
        draws = np.stack([synthesize_link(los, 1.3, F, 0, model, rng)
                          for _ in range(25_000)])
        pl = free_space_amplitude(F, 1.3)
        assert np.mean(np.abs(draws) ** 2) == pytest.approx(pl**2, rel=0.02)

    def test_nonpositive_distance_rejected(self, rng):
        model = AbsorptionModel.constant(0.0)
        with pytest.raises(Exception):
            synthesize_link(np.ones(2, dtype=complex), 0.0, F, 1, model, rng)


class TestBuildChannelSet:
    def test_rank_one_ris_channel_without_scattering(self):
        rng = np.random.default_rng(0)
        geo = random_geometry(rng, 2, 6, 9)
        params = make_system(rng, 2, zeta=1)
        ch = build_channel_set(geo, params, AbsorptionModel.constant(0.2), rng)
        assert np.linalg.matrix_rank(ch.h_sr, tol=1e-12 * np.linalg.norm(ch.h_sr)) == 1

    def test_direct_link_absent_zeroes_last_column(self):
        rng = np.random.default_rng(1)
        geo = random_geometry(rng, 3, 4, 5)
        params = make_system(rng, 3, zeta=0, direct=False)
        ch = build_channel_set(geo, params, AbsorptionModel.constant(0.1), rng)
        for i in range(3):
            assert np.all(ch.h_rt[i] == 0)
            assert np.all(ch.stacked[i][:, -1] == 0)

    def test_stacking_identity(self, rng):
        geo = random_geometry(rng, 2, 4, 7)
        params = make_system(rng, 2, zeta=0)
        ch = build_channel_set(geo, params, AbsorptionModel.constant(0.05), rng)
        theta = np.exp(1j * rng.uniform(0, 2 * np.pi, 7))
        theta0 = np.concatenate([theta, [1.0 + 0.0j]])
        for i in range(2):
            direct = ch.stacked[i] @ theta0
            manual = ch.h_rt[i] + ch.h_sr @ (np.diag(ch.h_st[i]) @ theta)
            assert direct == pytest.approx(manual, rel=1e-12)

    def test_seed_reproducibility(self):
        rng = np.random.default_rng(5)
        geo = random_geometry(rng, 2, 4, 7)
        params = make_system(rng, 2, zeta=0)
        model = AbsorptionModel.constant(0.05)
        a = build_channel_set(geo, params, model, np.random.default_rng(99))
        b = build_channel_set(geo, params, model, np.random.default_rng(99))
        assert np.array_equal(a.h_sr, b.h_sr)
        for i in range(2):
            assert np.array_equal(a.stacked[i], b.stacked[i])

    def test_direct_channel_entry_power(self):
        # Monte Carlo over draws of h_rt_0 under scattering
        rng = np.random.default_rng(11)
        geo = random_geometry(rng, 1, 4, 3)
        params = make_system(rng, 1, zeta=0)
        model = AbsorptionModel.constant(0.4)
        entries = []
        for _ in range(25_000):
            ch = build_channel_set(geo, params, model, rng)
            entries.append(ch.h_rt[0])
        pl = free_space_amplitude(params.carrier_frequency, geo.d[0])
        assert np.mean(np.abs(np.stack(entries)) ** 2) == pytest.approx(pl**2, rel=0.02)

    def test_deterministic_entry_power_under_noise_model(self):
        # zeta = 1 keeps exactly the tau fraction of the pathloss power
        rng = np.random.default_rng(3)
        geo = random_geometry(rng, 1, 5, 4)
        params = make_system(rng, 1, zeta=1)
        model = AbsorptionModel.constant(0.33)
        ch = build_channel_set(geo, params, model, rng)
        pl = free_space_amplitude(params.carrier_frequency, geo.d[0])
        tau = np.exp(-0.33 * geo.d[0])
        assert np.mean(np.abs(ch.h_rt[0]) ** 2) == pytest.approx(tau * pl**2, rel=1e-12)

    def test_zero_element_ris(self, rng):
        geo = random_geometry(rng, 1, 3, 0)
        params = make_system(rng, 1, zeta=0)
        ch = build_channel_set(geo, params, AbsorptionModel.constant(0.0), rng)
        assert ch.h_sr.shape == (3, 0)
        assert ch.stacked[0].shape == (3, 1)

    def test_complex_normal_moments(self, rng):
        z = complex_normal(rng, (200_000,))
        assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, rel=0.02)
        assert np.abs(np.mean(z)) < 0.01
        assert np.abs(np.mean(z**2)) < 0.01  # circular symmetry

    def test_save_npz(self, rng, tmp_path):
        geo = random_geometry(rng, 1, 3, 2)
        params = make_system(rng, 1, zeta=0)
        ch = build_channel_set(geo, params, AbsorptionModel.constant(0.0), rng)
        path = tmp_path / "dump.npz"
        ch.save_npz(str(path))
        loaded = np.load(path)
        assert np.array_equal(loaded["h_sr"], ch.h_sr)
        assert np.array_equal(loaded["stacked_0"], ch.stacked[0])
