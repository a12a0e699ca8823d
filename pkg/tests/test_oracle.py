import math

import numpy as np
import pytest

from envcorr import bands as bc
from envcorr import oracle as o
from envcorr.errors import ValidityHorizonError

WR = 50.0
WD = WR / math.sqrt(11)
PERIOD = 2 * math.pi / WD


@pytest.fixture(scope="module")
def model():
    return o.build_discrete_model(WR, WD, WR**2 / 32, n_modes=100, T_R=20.0)


@pytest.fixture(scope="module")
def short_runs(model):
    max_dt = o.MAX_STEP / model.omega_max
    tracked = (0, model.mode_index("R", 3), model.mode_index("L", 10))
    fl = o.evolve_covariance(model, 2.2 * PERIOD, dt=max_dt, tracked=tracked)
    di = o.evolve_covariance(model, 2.2 * PERIOD, dt=max_dt, tracked=tracked, method="direct")
    return fl, di


class TestModel:
    def test_grid_commensurate_with_drive(self, model):
        per_drive = WD / model.delta_omega
        assert per_drive == pytest.approx(round(per_drive), abs=1e-9)
        assert model.grid_index(WD) == round(per_drive)
        with pytest.raises(ValueError):
            model.grid_index(WD + model.delta_omega / 3)

    def test_counterterm_matches_continuum(self, model):
        assert model.counterterm == pytest.approx(2 * model.density_R.kernel(0.0), rel=0.01)

    def test_small_bath_rejected(self):
        with pytest.raises(ValueError, match="n_modes"):
            o.build_discrete_model(WR, WD, 0.0, n_modes=99)

    def test_short_grid_rejected(self):
        with pytest.raises(ValueError, match="omega_max"):
            o.build_discrete_model(WR, WD, 0.0, n_modes=100, omega_max=WR)

    def test_mode_index(self, model):
        assert model.mode_index("R", 1) == 1
        assert model.mode_index("L", 1) == model.n_modes + 1
        with pytest.raises(IndexError):
            model.mode_index("R", 0)

    def test_initial_state_is_thermal(self, model):
        sigma = model.initial_covariance()
        idx = model.mode_index("R", 5)
        s = model.quadrature_scale(idx)
        block = sigma[2 * idx:2 * idx + 2, 2 * idx:2 * idx + 2] * np.outer(s, s)
        nu = 0.5 + bc.planck_occupation(model.omega[4], 20.0)
        assert np.allclose(block, nu * np.eye(2), rtol=1e-12)


class TestEvolution:
    def test_recurrence_guard(self, model):
        with pytest.raises(ValueError, match="recurrence"):
            o.evolve_covariance(model, model.recurrence_time)

    def test_step_guard(self, model):
        with pytest.raises(ValueError, match="dt"):
            o.evolve_covariance(model, 0.1, dt=1.0 / model.omega_max)

    def test_unknown_method(self, model):
        with pytest.raises(ValueError, match="method"):
            o.evolve_covariance(model, 0.5, method="euler")

    def test_floquet_matches_direct(self, short_runs):
        fl, di = short_runs
        assert fl.blocks.shape == di.blocks.shape
        assert np.allclose(fl.times, di.times)
        scale = np.abs(fl.blocks).max()
        assert np.max(np.abs(fl.blocks - di.blocks)) < 1e-8 * scale

    def test_symplectic_spectrum_conserved(self, short_runs):
        for traj in short_runs:
            assert traj.spectrum_drift < o.DRIFT_TOL

    def test_uncoupled_modes_stay_put(self):
        weak = o.build_discrete_model(WR, WD, 0.0, gamma0=1e-14, n_modes=100, T_R=20.0)
        idx = weak.mode_index("R", 7)
        traj = o.evolve_covariance(weak, 0.5, dt=o.MAX_STEP / weak.omega_max,
                                   tracked=(0, idx))
        nu = 0.5 + bc.planck_occupation(weak.omega[6], 20.0)
        assert np.allclose(traj.block(0, 0), 0.5 * np.eye(2), atol=1e-9)
        assert np.allclose(traj.block(idx, idx), nu * np.eye(2), rtol=1e-9)
        assert np.allclose(traj.block(0, idx), 0.0, atol=1e-6)

    def test_spectrum_helper(self):
        sigma = np.diag([0.5, 0.5, 2.0, 2.0])
        assert np.allclose(o.symplectic_spectrum(sigma), [0.5, 2.0])


class TestOutput:
    def test_trajectory_file(self, short_runs, tmp_path):
        traj = short_runs[0]
        path = tmp_path / "traj.txt"
        o.write_trajectory(traj, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# tracked oscillators")
        data = np.loadtxt(path)
        dim = traj.blocks.shape[1]
        assert data.shape == (len(traj.times), 1 + dim * (dim + 1) // 2)
        assert np.allclose(data[:, 0], traj.times)
        assert np.allclose(data[:, 1], traj.blocks[:, 0, 0], rtol=1e-14)

    def test_rate_extraction_needs_cycles(self, short_runs):
        traj = short_runs[0]
        a, b = traj.tracked[1], traj.tracked[2]
        with pytest.raises(ValueError, match="20 driving cycles"):
            o.extract_band_rates(traj, a, b, 1.0, 1.0, bc.NONRESONANT, transient=0.0)
        with pytest.raises(ValueError, match="relation"):
            o.extract_band_rates(traj, a, b, 1.0, 1.0, "sideways")

    def test_flat_fit_is_accepted(self):
        t = np.linspace(0, 10, 50)
        coef, r2 = o._fit(t, np.full_like(t, 3.0), 1, "flat", 3.0)
        assert r2 == 1.0 and coef[1] == pytest.approx(0.0, abs=1e-12)

    def test_noisy_fit_is_rejected(self):
        t = np.linspace(0, 10, 50)
        y = np.random.default_rng(1).normal(size=t.size)
        with pytest.raises(ValidityHorizonError, match="R\\^2"):
            o._fit(t, y, 1, "noise", 1.0)

    def test_cross_amplitude_demodulation(self):
        # a rotating pair correlation <a_i a_j> = c exp(-i(w_i + w_j) t) comes back as c
        t = np.linspace(0, 3, 40)
        wi, wj, c = 2.0, 5.0, 0.3 - 0.1j
        pair = c * np.exp(-1j * (wi + wj) * t)
        g = np.empty((t.size, 2, 2))
        g[:, 0, 0], g[:, 1, 1] = pair.real, -pair.real
        g[:, 0, 1] = g[:, 1, 0] = pair.imag
        amp, sign = o._cross_amplitude(g, t, wi, wj, bc.NONRESONANT)
        assert sign == -1 and np.allclose(amp, c)
        flow = c * np.exp(-1j * (wi - wj) * t)
        g[:, 0, 0] = g[:, 1, 1] = flow.real
        g[:, 1, 0], g[:, 0, 1] = flow.imag, -flow.imag
        amp, sign = o._cross_amplitude(g, t, wi, wj, bc.RESONANT)
        assert sign == 1 and np.allclose(amp, c)
