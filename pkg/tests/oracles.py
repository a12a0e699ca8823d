"""Independent reference implementations used to derive and cross-check values.

Nothing here shares code with the package: symplectic spectra come from
eigenvalues of i Omega sigma, discord from a direct minimisation over pure
Gaussian measurements, and Green-function pieces from mpmath quadrature.
"""
import math

import mpmath as mp
import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

OMEGA2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA4 = np.kron(np.eye(2), OMEGA2)


def spectrum(sigma):
    """Symplectic eigenvalues (descending) via the spectrum of i Omega sigma."""
    n = sigma.shape[0] // 2
    omega = np.kron(np.eye(n), OMEGA2)
    ev = np.abs(np.linalg.eigvals(1j * omega @ sigma).real)
    return np.sort(ev)[::-1][::2]


def pt_spectrum(sigma):
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    return spectrum(flip @ sigma @ flip)


def f(x):
    x = float(x)
    if x - 0.5 < 1e-15:
        return 0.0
    return (x + 0.5) * math.log(x + 0.5) - (x - 0.5) * math.log(x - 0.5)


def mutual_information(sigma):
    l1, l2 = spectrum(sigma)
    a = math.sqrt(np.linalg.det(sigma[:2, :2]))
    b = math.sqrt(np.linalg.det(sigma[2:, 2:]))
    return f(a) + f(b) - f(l1) - f(l2)


def log_negativity(sigma):
    return max(0.0, -math.log(2 * pt_spectrum(sigma)[-1]))


def _conditional_det(sigma, r, phi):
    alpha, beta, gamma = sigma[:2, :2], sigma[2:, 2:], sigma[:2, 2:]
    rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    meas = rot @ np.diag([math.exp(2 * r), math.exp(-2 * r)]) / 2 @ rot.T
    cond = alpha - gamma @ np.linalg.inv(beta + meas) @ gamma.T
    return np.linalg.det(cond)


def discord_bruteforce(sigma, r_max=9.0):
    """Gaussian discord, measurement on the second mode, by direct minimisation.

    The squeezing is bounded through r = r_max tanh(x) so the homodyne limit
    is approached without overflow.
    """
    best = math.inf
    obj = lambda x: _conditional_det(sigma, r_max * math.tanh(x[0]), x[1])
    for x0 in np.linspace(-3, 3, 25):
        for phi0 in np.linspace(0, math.pi, 9, endpoint=False):
            res = minimize(obj, [x0, phi0],
                           method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-18, "maxiter": 4000})
            best = min(best, res.fun)
    l1, l2 = spectrum(sigma)
    b = math.sqrt(np.linalg.det(sigma[2:, 2:]))
    return f(b) - f(l1) - f(l2) + f(math.sqrt(best))


def random_local_symplectic(rng):
    """Product of a rotation, a squeeze and a rotation."""
    def rot(t):
        return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])

    r = rng.uniform(-1, 1)
    return rot(rng.uniform(0, 2 * math.pi)) @ np.diag([math.exp(r), math.exp(-r)]) @ rot(
        rng.uniform(0, 2 * math.pi))


def lorentz_drude_kernel_quad(gamma0, cutoff, t, mass=1.0):
    """int_0^inf I(w) cos(w t) / (m w) dw by mpmath quadrature."""
    mp.mp.dps = 30
    pref = 2 * mass * gamma0 * cutoff**2 / mp.pi

    def integrand(w):
        return pref / (w**2 + cutoff**2) * mp.cos(w * t) / mass

    if t == 0:
        return float(mp.quad(integrand, [0, mp.inf]))
    return float(mp.quadosc(integrand, [0, mp.inf], omega=t))


def lorentz_drude_laplace_quad(gamma0, cutoff, s, mass=1.0, omega_max=np.inf):
    """Laplace transform of the kernel, using L[cos(w t)](s) = s / (s^2 + w^2) under the integral."""
    pref = 2 * mass * gamma0 * cutoff**2 / math.pi
    s = complex(s)
    integrand = lambda w: pref / (w**2 + cutoff**2) / mass * s / (s**2 + w**2)
    opts = dict(epsabs=0, epsrel=1e-12, limit=800)
    edges = sorted({0.0, min(abs(s.imag), omega_max), omega_max} - {math.inf}) + (
        [math.inf] if omega_max == np.inf else [])
    total = 0j
    for lo, hi in zip(edges, edges[1:]):
        total += quad(lambda w: integrand(w).real, lo, hi, **opts)[0]
        total += 1j * quad(lambda w: integrand(w).imag, lo, hi, **opts)[0]
    return total


def green_static_mp(omega_r, gamma0, cutoff, s):
    """[s^2 + omega_r^2 + s * gamma0 Lambda / (s + Lambda)]^-1 in 40-digit arithmetic."""
    with mp.workdps(40):
        s = mp.mpc(s)
        return complex(1 / (s**2 + omega_r**2 + s * gamma0 * cutoff / (s + cutoff)))


def floquet_coefficients_exact(omega_r, omega_d, amplitude, gamma_total, cutoff, s, k_window=8):
    """Solve g^-1(s + i k w_d) A_k + (V/2)(A_{k-1} + A_{k+1}) = delta_k0 as one linear system.

    ``gamma_total`` is the summed damping constant of an untruncated Lorentz-Drude
    bath.  No perturbative truncation: the Floquet ladder is cut at |k| <= k_window
    and solved directly in 40-digit arithmetic.  Returns {k: A_k(s)}.
    """
    with mp.workdps(40):
        ks = list(range(-k_window, k_window + 1))
        n = len(ks)
        mat = mp.zeros(n, n)
        rhs = mp.zeros(n, 1)
        for row, k in enumerate(ks):
            z = mp.mpc(s) + 1j * k * omega_d
            mat[row, row] = z**2 + omega_r**2 + z * gamma_total * cutoff / (z + cutoff)
            if row > 0:
                mat[row, row - 1] = amplitude / 2
            if row < n - 1:
                mat[row, row + 1] = amplitude / 2
            rhs[row] = 1 if k == 0 else 0
        sol = mp.lu_solve(mat, rhs)
        return {k: complex(sol[i]) for i, k in enumerate(ks)}


def planck(w, T):
    return 0.0 if T == 0 else float(1 / mp.expm1(mp.mpf(w) / T))


def lorentz_drude_density(w, gamma0, cutoff, mass):
    return 2 * mass * gamma0 * w * cutoff**2 / (math.pi * (w * w + cutoff * cutoff))


def band_rates_reference(omega_r, omega_d, amplitude, gamma0, cutoff, mass, T_R, T_L,
                         omega_i, delta_omega, relation, k=1, k_window=8):
    """Gamma, heat current per bandwidth (band i) and 2 sqrt(det) slope, from exact A_k.

    Written directly from the rate formulas with both reservoirs sharing one
    density; meant as a check on the package's bookkeeping, not its algebra.
    """
    dens = lambda w: lorentz_drude_density(w, gamma0, cutoff, mass) if w > 0 else 0.0
    occ = {"R": lambda w: planck(w, T_R), "L": lambda w: planck(w, T_L)}
    coeff = lambda q, w: floquet_coefficients_exact(omega_r, omega_d, amplitude, 2 * gamma0,
                                                    cutoff, 1j * w, k_window)[q]
    omega_j = k * omega_d - omega_i if relation == "nonresonant" else omega_i + k * omega_d
    pref = delta_omega**2 / mass**2 * dens(omega_i) * dens(omega_j)
    n_i, n_j = occ["R"](omega_i), occ["L"](omega_j)
    if relation == "nonresonant":
        amp = ((2 * n_i + 1) * np.conj(coeff(-k, omega_i))
               + (2 * n_j + 1) * np.conj(coeff(-k, omega_j)))
        gamma = -pref * abs(amp) ** 2 / 4
    else:
        amp = n_i * coeff(k, omega_i) - n_j * np.conj(coeff(-k, omega_j))
        gamma = pref * abs(amp) ** 2

    qdot = 0.0
    drift = 0.0
    for q in range(-4, 5):
        wq = omega_i - q * omega_d
        if wq == 0:
            continue
        a2 = abs(coeff(q, wq)) ** 2
        for side in ("R", "L"):
            p = math.pi * dens(omega_i) * dens(abs(wq)) * a2 / (2 * mass**2)
            if wq > 0:
                qdot += omega_i * p * (occ[side](wq) - n_i)
            else:
                qdot += omega_i * p * (occ[side](-wq) + n_i + 1)
    slope = 2 * qdot * delta_omega / omega_i
    return gamma, qdot, slope
