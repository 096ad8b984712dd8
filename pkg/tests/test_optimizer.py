import numpy as np
import pytest
import scipy.linalg

from thzris import AbsorptionModel, Beamformer, NoiseModel, OptimizerConfig, RisConfig, \
    bcd_optimize, build_channel_set, gaussian_randomize, molecular_noise, \
    optimal_beamformer, optimize_ris, sinr
from thzris.channel import stack_channels
from thzris.channel import ChannelSet

from conftest import make_instance, make_system, random_geometry

FAST = OptimizerConfig(n_randomizations=400)


def unit(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


class TestOptimalBeamformer:
    def test_matched_filter_without_interference(self, rng):
        channels, noise, params, _, _ = make_instance(21, n_int=0, zeta=1)
        theta0 = RisConfig.random_phases(channels.n_ris_elements, rng)
        u = optimal_beamformer(theta0, channels, noise, params)
        g0 = channels.stacked[0] @ theta0.theta0
        expected = g0 / np.linalg.norm(g0)
        assert u.u == pytest.approx(expected, rel=1e-12)

    def test_parallel_interferer_keeps_direction(self, rng):
        # G1 proportional to G0: G0 is an eigenvector of A, direction survives
        channels, noise, params, _, _ = make_instance(22, n_int=1, zeta=0)
        theta0 = RisConfig.random_phases(channels.n_ris_elements, rng)
        g0 = channels.stacked[0] @ theta0.theta0
        h1 = np.zeros_like(channels.stacked[1])
        h1[:, -1] = 2.4 * np.exp(0.7j) * g0  # direct column only; theta0[-1] = 1
        h1_rt = h1[:, -1]
        stacked = (channels.stacked[0], stack_channels(
            np.zeros_like(channels.h_sr), np.zeros_like(channels.h_st[1]), h1_rt))
        channels2 = ChannelSet(h_rt=(channels.h_rt[0], h1_rt),
                               h_st=(channels.h_st[0], np.zeros_like(channels.h_st[1])),
                               h_sr=channels.h_sr, stacked=stacked)
        u = optimal_beamformer(theta0, channels2, noise, params)
        cos = np.abs(np.vdot(u.u, g0)) / np.linalg.norm(g0)
        assert cos == pytest.approx(1.0, rel=1e-10)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_generalized_eigenvector_oracle(self, seed):
        rng = np.random.default_rng(40 + seed)
        channels, noise, params, _, _ = make_instance(40 + seed, n_rx=4, n_int=2, zeta=1)
        theta0 = RisConfig.random_phases(channels.n_ris_elements, rng)
        u = optimal_beamformer(theta0, channels, noise, params)

        sigma_sq = noise.effective_power(theta0.norm_sq)
        g = [h @ theta0.theta0 for h in channels.stacked]
        num = params.tx_powers[0] * np.outer(g[0], g[0].conj())
        den = sigma_sq * np.eye(4, dtype=complex)
        for p_i, g_i in zip(params.tx_powers[1:], g[1:]):
            den = den + p_i * np.outer(g_i, g_i.conj())
        eigvals, eigvecs = scipy.linalg.eigh(num, den)
        principal = eigvecs[:, -1]
        principal = principal / np.linalg.norm(principal)
        phase = np.vdot(principal, u.u)
        aligned = principal * phase / np.abs(phase)
        assert np.linalg.norm(aligned - u.u) < 1e-8

        gamma_star = sinr(u, theta0, channels, noise, params)
        probes = np.random.default_rng(seed).standard_normal((10_000, 4)) \
            + 1j * np.random.default_rng(seed + 1).standard_normal((10_000, 4))
        probes /= np.linalg.norm(probes, axis=1, keepdims=True)
        received = probes.conj() @ np.stack(g).T
        signal = params.tx_powers[0] * np.abs(received[:, 0]) ** 2
        interf = np.sum(np.array(params.tx_powers[1:]) * np.abs(received[:, 1:]) ** 2, axis=1)
        gammas = signal / (interf + sigma_sq)
        assert gamma_star >= np.max(gammas) - 1e-10 * gamma_star

    def test_zero_channel_warns_and_returns_basis_vector(self):
        h_sr = np.zeros((3, 2), dtype=complex)
        zero_st = np.zeros(2, dtype=complex)
        zero_rt = np.zeros(3, dtype=complex)
        channels = ChannelSet(h_rt=(zero_rt,), h_st=(zero_st,), h_sr=h_sr,
                              stacked=(stack_channels(h_sr, zero_st, zero_rt),))
        noise = NoiseModel(1e-12, 0.0, 0.0, zeta=1)
        params = make_system(np.random.default_rng(0), 1, zeta=1)
        with pytest.warns(RuntimeWarning):
            u = optimal_beamformer(RisConfig.all_ones(2), channels, noise, params)
        assert u.u == pytest.approx(np.array([1.0, 0.0, 0.0], dtype=complex))


class TestGaussianRandomize:
    def test_rank_one_all_ones_recovered_exactly(self, rng):
        psi = np.ones((5, 5), dtype=complex)
        for _ in range(10):
            cand = gaussian_randomize(psi, rng)
            assert cand.theta0 == pytest.approx(np.ones(5, dtype=complex))

    def test_rank_one_phases_recovered(self, rng):
        theta = np.exp(1j * rng.uniform(0, 2 * np.pi, 6))
        theta[-1] = 1.0
        psi = np.outer(theta, theta.conj())
        cand = gaussian_randomize(psi, rng)
        assert cand.theta0 == pytest.approx(theta, abs=1e-7)

    def test_identity_gives_uniform_unit_phases(self, rng):
        cand = gaussian_randomize(np.eye(9, dtype=complex), rng)
        assert np.abs(cand.theta0) == pytest.approx(np.ones(9))
        assert cand.theta0[-1] == 1.0

    def test_candidates_always_feasible(self, rng):
        for trial in range(10):
            a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            psi = a @ a.conj().T
            cand = gaussian_randomize(psi, rng)
            assert np.all(np.abs(cand.theta0) <= 1.0 + 1e-12)
            assert cand.theta0[-1] == 1.0


class TestOptimizeRis:
    def test_phase_alignment_against_grid(self, rng):
        # N = 2, no interferers, scattering model: exhaustive 64-point grid oracle
        channels, noise, params, _, _ = make_instance(60, n_rx=3, n_ris=2, n_int=0, zeta=0)
        u = Beamformer(unit(rng, 3))
        step = optimize_ris(u, channels, noise, params, FAST, rng)

        grid = np.exp(2j * np.pi * np.arange(64) / 64)
        p1, p2 = np.meshgrid(grid, grid, indexing="ij")
        thetas = np.stack([p1.ravel(), p2.ravel(), np.ones(64 * 64, dtype=complex)])
        f0 = channels.stacked[0].conj().T @ u.u
        signal = params.tx_powers[0] * np.abs(f0.conj() @ thetas) ** 2
        denom = noise.effective_power(3.0)
        best_grid = float(np.max(signal)) / denom
        assert step.gamma == pytest.approx(best_grid, rel=0.02)
        assert step.gamma <= step.t_star * (1 + 1e-6)

    def test_achieved_gamma_below_relaxation_bound(self):
        for seed in range(6):
            rng = np.random.default_rng(600 + seed)
            channels, noise, params, _, _ = make_instance(
                600 + seed, n_rx=3, n_ris=4, n_int=2, zeta=seed % 2)
            u = Beamformer(unit(rng, 3))
            step = optimize_ris(u, channels, noise, params, FAST, rng)
            assert step.gamma <= step.t_star * (1 + 1e-6)
            # bisection queries: all feasible t below all infeasible t
            feas = [t for t, ok in step.bisection if ok]
            infeas = [t for t, ok in step.bisection if not ok]
            if feas and infeas:
                assert max(feas) < min(infeas)

    def test_zero_coupling_returns_zero_bound(self, rng):
        h_sr = np.zeros((2, 3), dtype=complex)
        zero_st = np.zeros(3, dtype=complex)
        zero_rt = np.zeros(2, dtype=complex)
        channels = ChannelSet(h_rt=(zero_rt,), h_st=(zero_st,), h_sr=h_sr,
                              stacked=(stack_channels(h_sr, zero_st, zero_rt),))
        noise = NoiseModel(1e-12, 0.0, 0.0, zeta=1)
        params = make_system(rng, 1, zeta=1)
        u = Beamformer(np.array([1.0, 0.0], dtype=complex))
        step = optimize_ris(u, channels, noise, params, FAST, rng)
        assert step.t_star == 0.0
        assert step.gamma == 0.0


class TestBcdOptimize:
    def test_direct_only_converges_to_matched_filter(self, rng):
        # cascade is zero: the combiner is the matched filter, Theta irrelevant
        h_rt = unit(rng, 4) * 3e-5
        h_sr = np.zeros((4, 3), dtype=complex)
        h_st = np.zeros(3, dtype=complex)
        channels = ChannelSet(h_rt=(h_rt,), h_st=(h_st,), h_sr=h_sr,
                              stacked=(stack_channels(h_sr, h_st, h_rt),))
        noise = NoiseModel(1e-11, 0.0, 0.0, zeta=1)
        params = make_system(rng, 1, zeta=1)
        theta, u, trace = bcd_optimize(channels, noise, params, FAST,
                                       np.random.default_rng(0))
        expected_gamma = params.tx_powers[0] * np.linalg.norm(h_rt) ** 2 / 1e-11
        assert trace.gammas[0] == pytest.approx(expected_gamma, rel=1e-9)
        assert trace.gammas[-1] == pytest.approx(expected_gamma, rel=1e-9)
        assert trace.converged
        assert len(trace.iterations) == 2  # second pass only confirms the plateau
        mf = h_rt / np.linalg.norm(h_rt)
        assert np.abs(np.vdot(u.u, mf)) == pytest.approx(1.0, rel=1e-10)

    def test_seeded_runs_are_identical(self):
        channels, noise, params, _, _ = make_instance(70, n_rx=3, n_ris=5, n_int=1, zeta=1)
        runs = []
        for _ in range(2):
            theta, u, trace = bcd_optimize(channels, noise, params, FAST,
                                           np.random.default_rng(123))
            runs.append((theta.theta0.copy(), u.u.copy(), list(trace.gammas)))
        assert np.array_equal(runs[0][0], runs[1][0])
        assert np.array_equal(runs[0][1], runs[1][1])
        assert runs[0][2] == runs[1][2]

    def test_monotone_gamma_and_convergence_flag(self):
        for seed in range(5):
            channels, noise, params, _, _ = make_instance(
                700 + seed, n_rx=4, n_ris=6, n_int=2, zeta=seed % 2)
            _, _, trace = bcd_optimize(channels, noise, params, FAST,
                                       np.random.default_rng(seed))
            g = trace.gammas
            assert all(b >= a - 1e-12 * abs(a) for a, b in zip(g, g[1:]))
            assert len(trace.iterations) >= 2
            if trace.converged:
                assert trace.iterations[-1].delta <= FAST.epsilon

    def test_beats_random_baseline(self, rng):
        # small setup in the spirit of the default scenario
        channels, noise, params, _, _ = make_instance(80, n_rx=4, n_ris=8, n_int=3,
                                                      zeta=1, direct=False)
        _, _, trace = bcd_optimize(channels, noise, params, FAST,
                                   np.random.default_rng(5))
        baseline = []
        for s in range(1000):
            th = RisConfig.random_phases(8, np.random.default_rng(9000 + s))
            u = optimal_beamformer(th, channels, noise, params)
            baseline.append(sinr(u, th, channels, noise, params))
        assert trace.gammas[-1] >= 2.0 * float(np.mean(baseline))

    def test_extra_initial_candidate_dominates_it(self, rng):
        channels, noise, params, _, _ = make_instance(81, n_rx=3, n_ris=6, n_int=2,
                                                      zeta=1, direct=False)
        theta_rand = RisConfig.random_phases(6, rng)
        u_rand = optimal_beamformer(theta_rand, channels, noise, params)
        gamma_rand = sinr(u_rand, theta_rand, channels, noise, params)
        _, _, trace = bcd_optimize(channels, noise, params, FAST,
                                   np.random.default_rng(2),
                                   extra_initial_thetas=(theta_rand,))
        assert trace.gammas[-1] >= gamma_rand * (1 - 1e-12)

    def test_zeta_consistency_with_full_transmittance(self):
        # tau = 1 everywhere: both re-radiation models degenerate to the same system
        rng = np.random.default_rng(90)
        geo = random_geometry(rng, 3, 3, 5)
        model = AbsorptionModel.constant(0.0)
        traces = []
        for zeta in (0, 1):
            params = make_system(np.random.default_rng(91), 3, zeta=zeta, direct=True)
            channels = build_channel_set(geo, params, model, np.random.default_rng(92))
            noise = molecular_noise(geo, params, model)
            _, _, trace = bcd_optimize(channels, noise, params, FAST,
                                       np.random.default_rng(93))
            traces.append(trace.gammas)
        assert traces[0] == traces[1]
