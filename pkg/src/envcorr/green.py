"""
Green-function engine for the driven quantum Brownian oscillator.

The dressed system coordinate obeys

    x'' + V_R(t) x + (gamma * x')(t) = 0,   V_R(t) = omega_r^2 + sum_{k!=0} V_k e^{ik w_d t}

and its Green function is expanded as G(t, t') = sum_k A_k(t - t') e^{ik w_d t}.
The Laplace transforms A_k(s) solve a linear system that is iterated from the
static (undriven) propagator

    g(s) = 1 / (s^2 + omega_r^2 + s * gamma(s)).

Everything lives on the imaginary axis s = i*omega in practice; damping keeps
every pole strictly in the left half plane so no regulator is needed.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

__all__ = [
    "SpectralDensity",
    "DrivingSpec",
    "GreenCoefficients",
    "spectral_density_value",
    "dissipation_laplace",
    "static_green",
    "solve_green_coefficients",
    "residual_check",
    "evaluate_Ak",
    "PerturbationWarning",
]

MAX_AUTO_ORDER = 6
AUTO_RESIDUAL_TOL = 1e-8


class PerturbationWarning(UserWarning):
    """The driving is too strong or too close to resonance for the series."""


@dataclass(frozen=True)
class SpectralDensity:
    """Ohmic Lorentz-Drude density I(w) = 2 m g0 w L^2 / pi (w^2 + L^2).

    ``mass`` is the system mass m, ``env_mass`` the mass of each bath
    oscillator.  I(w)/m is what enters every observable, so m only matters
    when the bath is discretised.  ``omega_max`` optionally switches the
    density off above a hard frequency cutoff (used to mirror a finite bath).
    """

    gamma0: float
    cutoff: float
    mass: float = 1.0
    env_mass: float = 1.0
    side: str = "R"
    omega_max: float | None = None

    def __post_init__(self):
        if self.gamma0 <= 0:
            raise ValueError("gamma0 must be positive")
        if self.cutoff <= 0:
            raise ValueError("cutoff must be positive")
        if self.mass <= 0 or self.env_mass <= 0:
            raise ValueError("masses must be positive")
        if self.side not in ("R", "L"):
            raise ValueError("side must be 'R' or 'L'")
        if self.omega_max is not None and self.omega_max <= 0:
            raise ValueError("omega_max must be positive")

    def value(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega < 0):
            raise ValueError("spectral density is defined for omega >= 0")
        lam2 = self.cutoff**2
        out = 2 * self.mass * self.gamma0 * omega * lam2 / (np.pi * (omega**2 + lam2))
        if self.omega_max is not None:
            out = np.where(omega <= self.omega_max, out, 0.0)
        return out if out.ndim else float(out)

    def kernel(self, t):
        """Dissipation kernel gamma(t) = int dw I(w) cos(wt) / (m w), t >= 0."""
        t = np.asarray(t, dtype=float)
        if self.omega_max is None:
            out = self.gamma0 * self.cutoff * np.exp(-self.cutoff * t)
        else:
            lam = self.cutoff
            pref = 2 * self.gamma0 * lam**2 / np.pi
            out = np.vectorize(
                lambda tt: pref * integrate.quad(
                    lambda w: 1.0 / (w * w + lam * lam), 0.0, self.omega_max,
                    weight="cos", wvar=tt)[0]
            )(t)
        return out if out.ndim else float(out)

    def laplace(self, s):
        """Laplace transform of the dissipation kernel."""
        s = np.asarray(s, dtype=complex)
        if np.any(np.real(s) < 0):
            raise ValueError("dissipation kernel transform requires Re(s) >= 0")
        lam = self.cutoff
        if self.omega_max is None:
            out = self.gamma0 * lam / (s + lam)
        else:
            out = np.vectorize(self._laplace_truncated, otypes=[complex])(s)
        return out if out.ndim else complex(out)

    def _laplace_truncated(self, s):
        lam, w_max = self.cutoff, self.omega_max
        pref = 2 * self.gamma0 * lam**2 / np.pi
        if s == 0:
            # only the w -> 0 end of the density survives
            return pref * np.pi / (2 * lam * lam)
        if s.real > 0:
            at = np.arctan(w_max / s)
        else:
            # boundary value of arctan(w_max / s) from Re(s) > 0
            w = s.imag
            if abs(w) < w_max:
                at = np.pi / 2 - 1j * np.arctanh(w / w_max)
            elif abs(w) > w_max:
                at = -1j * np.arctanh(w_max / w)
            else:
                raise ZeroDivisionError("Laplace transform diverges at |Im s| = omega_max")
        return pref * (at - s * np.arctan(w_max / lam) / lam) / (lam * lam - s * s)


def spectral_density_value(sd: SpectralDensity, omega):
    return sd.value(omega)


def dissipation_laplace(sd, s):
    """Laplace transform of the total dissipation kernel.

    ``sd`` is one density or a sequence of them (one per reservoir); the
    system feels the sum of their kernels.
    """
    if isinstance(sd, SpectralDensity):
        return sd.laplace(s)
    return sum(d.laplace(s) for d in sd)


@dataclass(frozen=True)
class DrivingSpec:
    """Periodic potential V(t) = omega_r^2 + sum_{k != 0} V_k exp(i k omega_d t).

    ``fourier_coeffs`` maps k -> V_k for k != 0; the static part is carried
    by the renormalized frequency omega_r.
    """

    omega_r: float
    omega_d: float
    fourier_coeffs: dict = field(default_factory=dict)
    harmonic_window: int | None = None

    def __post_init__(self):
        if self.omega_r <= 0:
            raise ValueError("omega_r must be positive")
        if self.omega_d <= 0:
            raise ValueError("omega_d must be positive")
        coeffs = {int(k): complex(v) for k, v in self.fourier_coeffs.items() if v != 0}
        if 0 in coeffs:
            raise ValueError("V_0 belongs in omega_r, not in fourier_coeffs")
        for k, v in coeffs.items():
            if abs(coeffs.get(-k, 0) - np.conj(v)) > 1e-12 * max(abs(v), 1.0):
                raise ValueError(f"V_{-k} must equal conj(V_{k}) for a real driving")
        object.__setattr__(self, "fourier_coeffs", coeffs)
        for n in range(1, 5):
            if abs(n * self.omega_d - 2 * self.omega_r) < 0.02 * self.omega_r:
                warnings.warn(
                    f"{n} * omega_d is within 2% of the parametric resonance 2 omega_r",
                    PerturbationWarning,
                    stacklevel=3,
                )

    @classmethod
    def cosine(cls, omega_r, omega_d, amplitude, harmonic_window=None):
        """V(t) = omega_r^2 + amplitude * cos(omega_d t)."""
        return cls(omega_r, omega_d, {1: amplitude / 2, -1: amplitude / 2}, harmonic_window)

    @property
    def max_harmonic(self) -> int:
        return max((abs(k) for k in self.fourier_coeffs), default=0)


def static_green(sd, driving: DrivingSpec, s) -> complex:
    """g(s) = 1 / (s^2 + omega_r^2 + s gamma(s)), gamma summed over ``sd``."""
    s = complex(s)
    den = s * s + driving.omega_r**2 + s * dissipation_laplace(sd, s)
    if abs(den) < 1e-300:
        raise ZeroDivisionError("on-resonance pole of the static Green function")
    return 1.0 / den


class GreenCoefficients:
    """Perturbative Floquet coefficients A_k(s), iterated to order m.

    Instances are read-only after construction; the memo cache is an
    ``lru_cache`` and is safe to hit from several threads.
    """

    def __init__(self, sd, driving: DrivingSpec, order: int, k_max: int):
        if order < 0:
            raise ValueError("perturbative order must be >= 0")
        self.sd = sd
        self.driving = driving
        self.order = int(order)
        self.k_max = int(k_max)
        self.warnings: list[str] = []
        needed = self.order * driving.max_harmonic
        if self.k_max < needed:
            self.warnings.append(
                f"harmonic window {self.k_max} < order * max harmonic = {needed}; truncated"
            )
        self._coeffs = tuple(sorted(driving.fourier_coeffs.items()))
        self._A = lru_cache(maxsize=65536)(self._A_uncached)
        self._g = lru_cache(maxsize=65536)(self._g_uncached)

    def _g_uncached(self, s):
        return static_green(self.sd, self.driving, s)

    def _A_uncached(self, k, m, s):
        if abs(k) > self.k_max:
            return 0j
        if m == 0:
            return self._g(s) if k == 0 else 0j
        acc = 1.0 + 0j if k == 0 else 0j
        for n, vn in self._coeffs:
            acc -= vn * self._A(k - n, m - 1, s)
        if acc == 0:
            return 0j
        return self._g(s + 1j * k * self.driving.omega_d) * acc

    def __call__(self, k: int, s) -> complex:
        """A_k(s) at the configured order (zero outside the harmonic window)."""
        return self._A(int(k), self.order, complex(s))

    def at_order(self, k: int, m: int, s) -> complex:
        return self._A(int(k), int(m), complex(s))

    def static(self, s) -> complex:
        return self._g(complex(s))

    def on_axis(self, k: int, omega: float) -> complex:
        return evaluate_Ak(self, k, omega)


def evaluate_Ak(gc: GreenCoefficients, k: int, omega: float) -> complex:
    """A_k(i omega), directly on the imaginary axis."""
    if abs(k) > gc.k_max:
        raise ValueError(f"|k| = {abs(k)} outside the harmonic window {gc.k_max}")
    return gc(k, 1j * float(omega))


def residual_check(gc: GreenCoefficients, s) -> float:
    """Largest violation of the exact linear system over the harmonic window."""
    s = complex(s)
    w = gc.driving.omega_d
    worst = 0.0
    for k in range(-gc.k_max, gc.k_max + 1):
        r = gc(k, s) / gc.static(s + 1j * k * w) - (1.0 if k == 0 else 0.0)
        for n, vn in gc._coeffs:
            if abs(k - n) <= gc.k_max:
                r += vn * gc(k - n, s)
        worst = max(worst, abs(r))
    return worst


def _probe_frequencies(driving: DrivingSpec, k_max: int):
    """Frequencies where the series is least accurate: near-resonant shifts."""
    wr, wd = driving.omega_r, driving.omega_d
    pts = {abs(wr - k * wd) for k in range(-k_max, k_max + 1)}
    pts |= set(np.linspace(0.02, 1.5, 16) * wr)
    return sorted(p for p in pts if p > 0)


def solve_green_coefficients(
    sd,
    driving: DrivingSpec,
    order_m: int | None = 2,
    k_max: int | None = None,
    probe=None,
) -> GreenCoefficients:
    """Build the A_k evaluator.

    ``sd`` is the spectral density, or a tuple of densities when several
    reservoirs damp the system.

    ``order_m=None`` starts at 2 and raises the order until the residual on
    the probe frequencies drops below 1e-8 or the order reaches 6.
    """
    if order_m is not None and order_m < 0:
        raise ValueError("order_m must be >= 0")
    if k_max is None:
        k_max = driving.harmonic_window
    auto = order_m is None
    order = 2 if auto else int(order_m)
    if k_max is None:
        k_max = 2 * driving.max_harmonic * (MAX_AUTO_ORDER if auto else max(order, 1))
    probe = _probe_frequencies(driving, k_max) if probe is None else list(probe)

    gc = GreenCoefficients(sd, driving, order, k_max)
    if auto:
        while order < MAX_AUTO_ORDER:
            worst = max(residual_check(gc, 1j * w) for w in probe)
            if worst < AUTO_RESIDUAL_TOL:
                break
            order += 1
            gc = GreenCoefficients(sd, driving, order, k_max)

    # size of the driving correction to the diagonal propagator
    if driving.fourier_coeffs and order >= 2:
        ratio = max(
            abs(gc.at_order(0, 2, 1j * w) / gc.at_order(0, 0, 1j * w) - 1) for w in probe
        )
        if ratio > 0.5:
            msg = f"first driving correction reaches {ratio:.2f} of the static propagator"
            gc.warnings.append(msg)
            warnings.warn(msg, PerturbationWarning, stacklevel=2)
    return gc
