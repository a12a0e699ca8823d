"""
Brute-force check of the band formulas: a finite bath, propagated exactly.

Both reservoirs are replaced by N oscillators each on the uniform grid
omega_n = n * d_omega.  The total Hamiltonian is quadratic, so the full
phase-space covariance evolves as sigma(t) = S(t) sigma(0) S(t)^T with
dS/dt = M(t) S.  Because M is periodic, one period of RK4 integration gives
the Floquet map S_T and every later time follows from S(t + mT) = S(t) S_T^m.

Phase-space ordering is (x, p, q_R1, p_R1, ..., q_RN, p_RN, q_L1, ..., p_LN).
Reduced blocks are reported in the dimensionless quadratures
q sqrt(m_n w_n), p / sqrt(m_n w_n), so the vacuum has variance 1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from . import bands as bc
from .errors import ValidityHorizonError
from .green import DrivingSpec, SpectralDensity, solve_green_coefficients

__all__ = [
    "DiscreteModel",
    "CovarianceTrajectory",
    "OracleRates",
    "build_discrete_model",
    "evolve_covariance",
    "extract_band_rates",
    "predict_band_rates",
    "run_reference_comparison",
    "symplectic_spectrum",
    "write_trajectory",
]

COUNTERTERM_TOL = 0.02
DRIFT_TOL = 1e-6
MAX_STEP = 0.05  # largest allowed omega_max * dt


@dataclass(frozen=True)
class DiscreteModel:
    omega: np.ndarray
    coupling_R: np.ndarray
    coupling_L: np.ndarray
    mass: float
    env_mass: float
    driving: DrivingSpec
    counterterm: float
    T_R: float
    T_L: float
    density_R: SpectralDensity
    density_L: SpectralDensity

    @property
    def n_modes(self) -> int:
        return len(self.omega)

    @property
    def delta_omega(self) -> float:
        return float(self.omega[1] - self.omega[0])

    @property
    def omega_max(self) -> float:
        return float(self.omega[-1])

    @property
    def dim(self) -> int:
        return 2 * (2 * self.n_modes + 1)

    @property
    def recurrence_time(self) -> float:
        return 2 * math.pi / self.delta_omega

    def mode_index(self, side: str, n: int) -> int:
        """Global oscillator index of grid mode n (1-based) on a side; 0 is the system."""
        if not 1 <= n <= self.n_modes:
            raise IndexError(f"grid index {n} outside 1..{self.n_modes}")
        return n if side == "R" else self.n_modes + n

    def grid_index(self, omega: float) -> int:
        n = int(round(omega / self.delta_omega))
        if abs(n * self.delta_omega - omega) > 1e-9 * max(omega, 1.0):
            raise ValueError(f"omega = {omega} is not on the grid")
        return n

    def bare_potential(self, t: float) -> float:
        """omega_r^2 plus the counterterm plus the periodic driving."""
        v = self.driving.omega_r**2 + self.counterterm
        for k, vk in self.driving.fourier_coeffs.items():
            v += (vk * np.exp(1j * k * self.driving.omega_d * t)).real
        return v

    def _arrays(self):
        masses = np.concatenate(([self.mass], np.full(2 * self.n_modes, self.env_mass)))
        freqs2 = np.concatenate(([0.0], self.omega**2, self.omega**2))
        lam = np.concatenate(([0.0], self.coupling_R, self.coupling_L))
        return masses, freqs2, lam

    def initial_covariance(self) -> np.ndarray:
        """Diagonal thermal state for the bath; the bare system oscillator in its ground state."""
        masses, _, _ = self._arrays()
        var = np.empty(self.dim)
        w_sys = self.driving.omega_r
        var[0] = 1 / (2 * self.mass * w_sys)
        var[1] = self.mass * w_sys / 2
        for side, temp in (("R", self.T_R), ("L", self.T_L)):
            for n, w in enumerate(self.omega, start=1):
                idx = self.mode_index(side, n)
                nu = 0.5 + (bc.planck_occupation(w, temp) if temp > 0 else 0.0)
                var[2 * idx] = nu / (masses[idx] * w)
                var[2 * idx + 1] = nu * masses[idx] * w
        return np.diag(var)

    def quadrature_scale(self, idx: int) -> np.ndarray:
        if idx == 0:
            w, m = self.driving.omega_r, self.mass
        else:
            n = idx if idx <= self.n_modes else idx - self.n_modes
            w, m = self.omega[n - 1], self.env_mass
        return np.array([math.sqrt(m * w), 1 / math.sqrt(m * w)])


def build_discrete_model(
    omega_r: float,
    omega_d: float,
    amplitude: float,
    gamma0: float = 1.0,
    cutoff: float | None = None,
    n_modes: int = 400,
    omega_max: float | None = None,
    T_R: float = 0.0,
    T_L: float = 0.0,
    mass: float = 1.0,
    env_mass: float = 0.1,
    k_max: int = 4,
) -> DiscreteModel:
    """Discretise both Lorentz-Drude reservoirs on a grid commensurate with omega_d.

    The grid spacing is omega_d / M for an integer M, so that the partners
    k omega_d - omega_i and omega_i + k omega_d of a grid mode are grid modes.
    ``amplitude`` is the cosine driving amplitude V.
    """
    if n_modes < 100:
        raise ValueError("n_modes must be >= 100")
    cutoff = 10 * omega_r if cutoff is None else cutoff
    needed = max(2 * omega_r, omega_d * k_max + omega_r)
    omega_max = needed if omega_max is None else omega_max
    if omega_max < needed:
        raise ValueError(f"omega_max must be >= {needed:.6g}")
    per_drive = math.floor(n_modes * omega_d / omega_max)
    if per_drive < 2:
        raise ValueError("grid too coarse to resolve omega_d")
    d_omega = omega_d / per_drive
    omega = d_omega * np.arange(1, n_modes + 1)
    w_top = float(omega[-1])

    densities = [SpectralDensity(gamma0, cutoff, mass, env_mass, side, omega_max=w_top)
                 for side in ("R", "L")]
    coupling = np.sqrt(env_mass * omega * densities[0].value(omega) * d_omega)

    # gamma(0) of the finite bath against its continuum value on (0, w_top]
    discrete = 2 * float(np.sum(coupling**2 / (mass * env_mass * omega**2)))
    continuum = 2 * densities[0].kernel(0.0)
    mismatch = abs(discrete / continuum - 1)
    if mismatch > COUNTERTERM_TOL:
        suggest = int(math.ceil(n_modes * mismatch / COUNTERTERM_TOL))
        raise ValueError(
            f"grid too coarse: counterterm off by {100 * mismatch:.2f}%; try n_modes >= {suggest}"
        )
    driving = DrivingSpec.cosine(omega_r, omega_d, amplitude)
    return DiscreteModel(omega, coupling, coupling.copy(), mass, env_mass, driving,
                         discrete, T_R, T_L, densities[0], densities[1])


def _flow(model: DiscreteModel):
    """apply(t, S) = M(t) @ S in O(dim^2), using the sparsity of M."""
    masses, freqs2, lam = model._arrays()
    inv_m = (1 / masses)[:, None]
    lam_col = lam[:, None]

    def apply(t, S):
        Q = S[0::2]
        Pm = S[1::2]
        out = np.empty_like(S)
        out[0::2] = Pm * inv_m
        k = masses * freqs2
        k[0] = model.mass * model.bare_potential(t)
        dP = -k[:, None] * Q
        dP[1:] -= lam_col[1:] * Q[0]
        dP[0] -= lam @ Q
        out[1::2] = dP
        return out

    return apply


def _rk4(apply, t, S, dt):
    k1 = apply(t, S)
    k2 = apply(t + dt / 2, S + dt / 2 * k1)
    k3 = apply(t + dt / 2, S + dt / 2 * k2)
    k4 = apply(t + dt, S + dt * k3)
    return S + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def symplectic_spectrum(sigma: np.ndarray) -> np.ndarray:
    """Sorted symplectic eigenvalues of an interleaved (q, p) covariance."""
    n = sigma.shape[0] // 2
    omega = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    ev = np.linalg.eigvals(1j * omega @ sigma)
    return np.sort(np.abs(ev.real))[::2]


@dataclass
class CovarianceTrajectory:
    """Reduced covariances of the tracked oscillators at each sample time."""

    times: np.ndarray
    tracked: tuple
    blocks: np.ndarray
    samples_per_period: int
    period: float
    spectrum_drift: float
    meta: dict = field(default_factory=dict)

    def block(self, a: int, b: int) -> np.ndarray:
        """Time series of the 2x2 block between tracked oscillators a and b."""
        ia, ib = self.tracked.index(a), self.tracked.index(b)
        return self.blocks[:, 2 * ia:2 * ia + 2, 2 * ib:2 * ib + 2]


def _rows(model, tracked):
    rows = np.array([[2 * i, 2 * i + 1] for i in tracked]).ravel()
    scale = np.concatenate([model.quadrature_scale(i) for i in tracked])
    return rows, scale


def evolve_covariance(
    model: DiscreteModel,
    t_final: float,
    dt: float | None = None,
    tracked=(),
    method: str = "floquet",
    samples_per_period: int = 16,
    check_spectrum: bool = True,
) -> CovarianceTrajectory:
    """Propagate the full Gaussian state and record blocks of ``tracked`` oscillators.

    ``method="floquet"`` integrates one driving period and reuses it;
    ``method="direct"`` integrates d sigma/dt = M sigma + sigma M^T over the
    whole run (only sensible for small baths).
    """
    if t_final >= model.recurrence_time:
        raise ValueError(
            f"t_final = {t_final:.4g} exceeds the recurrence time {model.recurrence_time:.4g}"
        )
    period = 2 * math.pi / model.driving.omega_d
    max_dt = MAX_STEP / model.omega_max
    if dt is None:
        dt = max_dt / 2
    if dt > max_dt:
        raise ValueError(f"dt must be <= {max_dt:.4g} (0.05 / omega_max)")
    steps_per_sample = max(1, math.ceil(period / samples_per_period / dt))
    dt = period / (samples_per_period * steps_per_sample)
    n_periods = math.floor(t_final / period)
    tracked = tuple(tracked) or (0,)
    rows, scale = _rows(model, tracked)
    apply = _flow(model)
    sigma0 = model.initial_covariance()
    var0 = np.diag(sigma0)

    if method == "floquet":
        S = np.eye(model.dim)
        phases = [S[rows].copy()]
        t = 0.0
        for j in range(samples_per_period):
            for _ in range(steps_per_sample):
                S = _rk4(apply, t, S, dt)
                t += dt
            if j < samples_per_period - 1:
                phases.append(S[rows].copy())
        S_T = S
        stacked = np.concatenate(phases)  # (phases * rows) x dim
        blocks, times = [], []
        for m in range(n_periods):
            for j in range(samples_per_period):
                R = stacked[j * len(rows):(j + 1) * len(rows)]
                blocks.append((R * var0) @ R.T)
                times.append(m * period + j * period / samples_per_period)
            stacked = stacked @ S_T
        drift = 0.0
        if check_spectrum:
            total = np.linalg.matrix_power(S_T, n_periods)
            sigma_t = (total * var0) @ total.T
            drift = _drift(sigma0, sigma_t)
    elif method == "direct":
        sigma = sigma0.copy()
        t = 0.0

        def rhs(tt, s):
            x = apply(tt, s)
            return x + x.T

        blocks, times = [], []
        for m in range(n_periods):
            for j in range(samples_per_period):
                blocks.append(sigma[np.ix_(rows, rows)].copy())
                times.append(t)
                for _ in range(steps_per_sample):
                    sigma = _rk4(rhs, t, sigma, dt)
                    t += dt
        drift = _drift(sigma0, sigma) if check_spectrum else 0.0
    else:
        raise ValueError("method must be 'floquet' or 'direct'")

    if drift > DRIFT_TOL:
        raise ValidityHorizonError(f"symplectic spectrum drifted by {drift:.2e}; reduce dt")
    blocks = np.array(blocks) * scale[None, :, None] * scale[None, None, :]
    return CovarianceTrajectory(np.array(times), tracked, blocks, samples_per_period,
                                period, drift, {"dt": dt, "method": method})


def _drift(sigma0, sigma_t):
    before = symplectic_spectrum(sigma0)
    after = symplectic_spectrum(sigma_t)
    return float(np.max(np.abs(after - before) / np.maximum(before, 1.0)))


@dataclass(frozen=True)
class OracleRates:
    gamma: float
    qdot_i: float
    qdot_j: float
    purity_slope_i: float
    purity_slope_j: float
    r2: dict


def _fit(t, y, degree, name, scale):
    coef = P.polyfit(t, y, degree)
    resid = y - P.polyval(t, coef)
    spread = np.sum((y - y.mean()) ** 2)
    # a flat series has no trend to explain; only test R^2 when something moves
    if spread > (1e-10 * scale) ** 2 * len(y):
        r2 = 1 - np.sum(resid**2) / spread
        if r2 < 0.9:
            raise ValidityHorizonError(
                f"transient not decayed or regime invalid: R^2 = {r2:.3f} for {name}"
            )
    else:
        r2 = 1.0
    return coef, float(r2)


def _cross_amplitude(g, t, omega_i, omega_j, relation):
    """Pair <a_i a_j> or transport <a_i a_j^dag> amplitude with free rotation removed."""
    if relation == bc.NONRESONANT:
        amp = (g[:, 0, 0] - g[:, 1, 1] + 1j * (g[:, 0, 1] + g[:, 1, 0])) / 2
        return amp * np.exp(1j * (omega_i + omega_j) * t), -1.0
    amp = (g[:, 0, 0] + g[:, 1, 1] + 1j * (g[:, 1, 0] - g[:, 0, 1])) / 2
    return amp * np.exp(1j * (omega_i - omega_j) * t), 1.0


def extract_band_rates(traj: CovarianceTrajectory, mode_i: int, mode_j: int,
                       omega_i: float, omega_j: float, relation: str,
                       transient: float = 5.0) -> OracleRates:
    """Cycle-averaged growth rates of a tracked oscillator pair.

    Local invariants (2 sqrt(det) of each local block and the energy) are
    averaged over each complete period past ``transient`` and fitted with
    straight lines.  The cross block is reduced to its pair (nonresonant) or
    transport (resonant) amplitude in the co-rotating frame before averaging;
    off-resonant correlations then average out and +-4|amplitude|^2, the
    cross determinant of the averaged state, is fitted with a quadratic.
    """
    if relation not in (bc.NONRESONANT, bc.RESONANT):
        raise ValueError("relation must be 'nonresonant' or 'resonant'")
    n = traj.samples_per_period
    n_periods = len(traj.times) // n
    first = math.ceil(transient / traj.period)
    if n_periods - first < 20:
        raise ValueError("need at least 20 driving cycles past the transient")
    a = traj.block(mode_i, mode_i)
    b = traj.block(mode_j, mode_j)
    g = traj.block(mode_i, mode_j)
    det = lambda m: m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    amp, sign = _cross_amplitude(g, traj.times, omega_i, omega_j, relation)
    series = {
        "two_root_det_i": 2 * np.sqrt(det(a)),
        "two_root_det_j": 2 * np.sqrt(det(b)),
        "energy_i": omega_i * (a[:, 0, 0] + a[:, 1, 1]) / 2,
        "energy_j": omega_j * (b[:, 0, 0] + b[:, 1, 1]) / 2,
        "amplitude": amp,
    }
    sl = slice(first * n, n_periods * n)
    t_mid = traj.times[sl].reshape(-1, n).mean(axis=1)
    avg = {k: v[sl].reshape(-1, n).mean(axis=1) for k, v in series.items()}

    fits, r2 = {}, {}
    for key in ("two_root_det_i", "two_root_det_j", "energy_i", "energy_j"):
        coef, r2[key] = _fit(t_mid, avg[key], 1, key, abs(avg[key]).max())
        fits[key] = coef[1]
    cross = sign * 4 * np.abs(avg["amplitude"]) ** 2
    coef, r2["gamma"] = _fit(t_mid, cross, 2, "gamma", 1e-30 + abs(cross).max())
    return OracleRates(coef[2], fits["energy_i"], fits["energy_j"],
                       fits["two_root_det_i"], fits["two_root_det_j"], r2)


def predict_band_rates(model: DiscreteModel, n_i: int, n_j: int, relation: str,
                       harmonic: int = 1, order=None) -> OracleRates:
    """Analytic counterparts of ``extract_band_rates`` for single grid modes."""
    dw = model.delta_omega
    env = bc.ThermalEnvironment(model.T_R, model.T_L, model.density_R, model.density_L)
    gc = solve_green_coefficients(env.densities, model.driving, order)
    band_i = bc.BandSpec(n_i * dw, dw, "R")
    band_j = bc.BandSpec(n_j * dw, dw, "L")
    pair = bc.BandPair(band_i, band_j, relation, harmonic)
    gamma = bc.cross_generator(pair, env, gc)
    slope = lambda band: 2 * (bc.band_local_variance(band, env, gc, 1.0)
                              - bc.band_local_variance(band, env, gc, 0.0))
    return OracleRates(gamma, bc.heat_current(band_i, env, gc) * dw,
                       bc.heat_current(band_j, env, gc) * dw,
                       slope(band_i), slope(band_j), {})


def write_trajectory(traj: CovarianceTrajectory, path) -> None:
    """Whitespace-delimited dump: time, then the upper triangle of the tracked covariance."""
    dim = traj.blocks.shape[1]
    iu = np.triu_indices(dim)
    names = ["time"] + [f"s{r}_{c}" for r, c in zip(*iu)]
    data = np.column_stack([traj.times] + [traj.blocks[:, r, c] for r, c in zip(*iu)])
    header = f"tracked oscillators {list(traj.tracked)}\n" + " ".join(names)
    np.savetxt(path, data, fmt="%.15e", header=header)


def run_reference_comparison(omega_r: float = 50.0, n_modes: int = 400, T_R: float = 20.0,
                             T_L: float = 0.0, n_i: int | None = None, cycles: int = 20,
                             transient: float = 5.0, trajectory_path=None) -> list[dict]:
    """Fitted-vs-analytic table for one nonresonant and one resonant k = 1 pair.

    Band i is an R grid mode below omega_d / 2; its nonresonant partner sits at
    omega_d - omega_i and its resonant partner at omega_i + omega_d, both on L.
    The spectrum-drift row compares against zero (its ``predicted`` is 0).
    """
    omega_d = omega_r / math.sqrt(11)
    model = build_discrete_model(omega_r, omega_d, omega_r**2 / 32, n_modes=n_modes,
                                 T_R=T_R, T_L=T_L)
    per_drive = round(omega_d / model.delta_omega)
    n_i = round(0.37 * per_drive) if n_i is None else n_i
    n_j, n_r = per_drive - n_i, n_i + per_drive
    tracked = (model.mode_index("R", n_i), model.mode_index("L", n_j),
               model.mode_index("L", n_r))
    period = 2 * math.pi / omega_d
    traj = evolve_covariance(model, transient + (cycles + 0.5) * period, tracked=tracked)
    if trajectory_path is not None:
        write_trajectory(traj, trajectory_path)
    dw = model.delta_omega
    rows = []

    def add(name, fitted, predicted):
        fitted, predicted = float(fitted), float(predicted)
        dev = abs(fitted - predicted) / abs(predicted) if predicted else abs(fitted)
        rows.append({"quantity": name, "fitted": fitted, "predicted": predicted,
                     "rel_dev": dev})

    for partner, n_p, rel, label in ((tracked[1], n_j, bc.NONRESONANT, "plus"),
                                     (tracked[2], n_r, bc.RESONANT, "minus")):
        got = extract_band_rates(traj, tracked[0], partner, n_i * dw, n_p * dw, rel,
                                 transient)
        want = predict_band_rates(model, n_i, n_p, rel)
        add(f"Gamma_{label}", got.gamma, want.gamma)
        if rel == bc.NONRESONANT:
            add("Q_dot_i", got.qdot_i, want.qdot_i)
            add("purity_slope_i", got.purity_slope_i, want.purity_slope_i)
        add(f"Q_dot_j_{label}", got.qdot_j, want.qdot_j)
        add(f"purity_slope_j_{label}", got.purity_slope_j, want.purity_slope_j)
    rows.append({"quantity": "spectrum_drift", "fitted": traj.spectrum_drift,
                 "predicted": 0.0,
                 "rel_dev": 0.0 if traj.spectrum_drift < DRIFT_TOL else math.inf})
    return rows
