"""
Long-time covariance of two environmental bands and the correlations it carries.

Two bands of bath oscillators, one around omega_i in the right reservoir and
one around omega_j in the left, only build time-extensive correlations when

    omega_i + omega_j = k omega_d   (nonresonant pair creation, "+")
    omega_j - omega_i = k omega_d   (resonant transport,        "-")

The cycle-averaged state is thermal plus a piece linear in t.  Written in
standard form it is fixed by the two purities and the cross generator
Gamma(t) = 4 det(gamma) = Gamma_pm t^2, and the closed-form measures below
are first-order expansions in |Gamma(t)|.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import gaussian as gt
from .errors import (
    DegeneratePurityError,
    RegimeError,
    RelationError,
    UnphysicalCovarianceError,
    ValidityHorizonError,
)
from .green import GreenCoefficients, SpectralDensity

__all__ = [
    "ThermalEnvironment",
    "BandSpec",
    "BandPair",
    "CorrelationReport",
    "NegativityResult",
    "NONRESONANT",
    "RESONANT",
    "UNCORRELATED",
    "planck_occupation",
    "interaction_probability",
    "heat_current",
    "heat_current_terms",
    "band_purity",
    "band_local_variance",
    "gamma_plus",
    "gamma_minus",
    "cross_generator",
    "assemble_sigma_av",
    "mutual_information_closed",
    "discord_ratio_closed",
    "discord_regime_limits",
    "negativity_closed",
    "kl_divergence_proxy",
    "generator_negativity_identity",
    "bound_check_ineq",
    "normalization_E0",
    "correlation_report",
]

NONRESONANT = "nonresonant"
RESONANT = "resonant"
UNCORRELATED = "uncorrelated"

MIN_PURITY_FRACTION = 0.05
DEGENERATE_PURITY_TOL = 1e-6
_MU_CEIL = 1.0 - 1e-15
WIDE_BAND_FRACTION = 0.1


class WideBandWarning(UserWarning):
    """Bandwidth is not small against the band centre."""


@dataclass(frozen=True)
class ThermalEnvironment:
    """Temperatures and spectral densities of both reservoirs (k_B = 1)."""

    T_R: float
    T_L: float
    density_R: SpectralDensity
    density_L: SpectralDensity | None = None

    def __post_init__(self):
        if self.T_R < 0:
            raise ValueError("T_R must be >= 0")
        if self.T_L < 0:
            raise ValueError("T_L must be >= 0")
        if self.density_L is None:
            object.__setattr__(self, "density_L", self.density_R)

    def temperature(self, side: str) -> float:
        return {"R": self.T_R, "L": self.T_L}[side]

    def density(self, side: str) -> SpectralDensity:
        return {"R": self.density_R, "L": self.density_L}[side]

    def occupation(self, side: str, omega: float) -> float:
        return planck_occupation(omega, self.temperature(side))

    @property
    def mass(self) -> float:
        return self.density_R.mass

    @property
    def densities(self) -> tuple:
        """Both reservoir densities, for the total dissipation kernel."""
        return (self.density_R, self.density_L)


@dataclass(frozen=True)
class BandSpec:
    omega_center: float
    delta_omega: float
    side: str = "R"

    def __post_init__(self):
        if self.omega_center <= 0:
            raise ValueError("band centre must be positive")
        if self.delta_omega <= 0:
            raise ValueError("bandwidth must be positive")
        if self.side not in ("R", "L"):
            raise ValueError("side must be 'R' or 'L'")
        if self.delta_omega > WIDE_BAND_FRACTION * self.omega_center:
            warnings.warn(f"band at {self.omega_center:.6g} is wider than "
                          f"{WIDE_BAND_FRACTION:.0%} of its centre; flat-band approximation is poor",
                          WideBandWarning, stacklevel=3)


@dataclass(frozen=True)
class BandPair:
    """Band i (right reservoir) and band j (left reservoir)."""

    band_i: BandSpec
    band_j: BandSpec
    relation: str
    harmonic: int = 0

    @classmethod
    def classify(cls, band_i: BandSpec, band_j: BandSpec, omega_d: float, k_max: int = 8):
        """Detect which relation (if any) the two band centres satisfy."""
        wi, wj = band_i.omega_center, band_j.omega_center
        tol = max(band_i.delta_omega, band_j.delta_omega) / 2
        for k in range(1, k_max + 1):
            if abs(wi + wj - k * omega_d) < tol:
                return cls(band_i, band_j, NONRESONANT, k)
        # k = 0 is plain elastic transport between equal frequencies
        for k in range(-k_max, k_max + 1):
            if abs(wj - wi - k * omega_d) < tol:
                return cls(band_i, band_j, RESONANT, k)
        return cls(band_i, band_j, UNCORRELATED, 0)

    @classmethod
    def nonresonant(cls, omega_i, omega_d, delta_omega, k=1):
        return cls(BandSpec(omega_i, delta_omega, "R"),
                   BandSpec(k * omega_d - omega_i, delta_omega, "L"), NONRESONANT, k)

    @classmethod
    def resonant(cls, omega_i, omega_d, delta_omega, k=1):
        return cls(BandSpec(omega_i, delta_omega, "R"),
                   BandSpec(omega_i + k * omega_d, delta_omega, "L"), RESONANT, k)


def planck_occupation(omega: float, T: float) -> float:
    """Bose occupation 1 / (exp(omega / T) - 1); zero at T = 0."""
    if omega <= 0:
        raise ValueError("Planck occupation needs omega > 0")
    if T < 0:
        raise ValueError("temperature must be >= 0")
    if T == 0:
        return 0.0
    x = omega / T
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


def interaction_probability(gc: GreenCoefficients, env: ThermalEnvironment, k: int,
                            omega_i: float, alpha: str, side: str = "R") -> float:
    """p^(k)_{side,alpha}(omega_i) = pi I_side(w_i) I_alpha(|w_i - k w_d|) |A_k|^2 / 2m^2."""
    w_k = omega_i - k * gc.driving.omega_d
    if w_k == 0:
        return 0.0
    m = env.mass
    i_side = env.density(side).value(omega_i)
    i_alpha = env.density(alpha).value(abs(w_k))
    amp = gc(k, 1j * w_k)
    return math.pi * i_side * i_alpha * abs(amp) ** 2 / (2 * m * m)


def heat_current_terms(band: BandSpec, env: ThermalEnvironment, gc: GreenCoefficients):
    """(transport, pair-creation) contributions to dQ/dt per unit bandwidth."""
    w = band.omega_center
    n_band = env.occupation(band.side, w)
    transport = 0.0
    pair = 0.0
    for k in range(-gc.k_max, gc.k_max + 1):
        w_k = w - k * gc.driving.omega_d
        if w_k == 0:
            continue
        for alpha in ("R", "L"):
            p = interaction_probability(gc, env, k, w, alpha, band.side)
            if p == 0.0:
                continue
            n_alpha = env.occupation(alpha, abs(w_k))
            if w_k > 0:
                transport += w * p * (n_alpha - n_band)
            else:
                pair += w * p * (n_alpha + n_band + 1)
    return transport, pair


def heat_current(band: BandSpec, env: ThermalEnvironment, gc: GreenCoefficients) -> float:
    """Long-time heat current into the band divided by its bandwidth."""
    transport, pair = heat_current_terms(band, env, gc)
    return transport + pair


def _two_root_det(band: BandSpec, env: ThermalEnvironment, gc: GreenCoefficients, t: float):
    """2 sqrt(det) of the band's local block, term by term."""
    w = band.omega_center
    wd = gc.driving.omega_d
    m = env.mass
    n_band = env.occupation(band.side, w)
    i_band = env.density(band.side).value(w)
    drift = 0.0
    for q in range(-gc.k_max, gc.k_max + 1):
        w_q = w - q * wd
        if w_q > 0:
            # transport with the mode at w - q w_d
            amp2 = abs(gc(q, 1j * w_q)) ** 2
            for alpha in ("R", "L"):
                drift += (env.density(alpha).value(w_q)
                          * (env.occupation(alpha, w_q) - n_band) * amp2)
        w_pair = q * wd - w
        if w_pair > 0:
            # pair creation with the mode at q w_d - w
            amp2 = abs(gc(-q, 1j * w_pair)) ** 2
            for alpha in ("R", "L"):
                drift += (env.density(alpha).value(w_pair)
                          * (env.occupation(alpha, w_pair) + n_band + 1) * amp2)
    rate = math.pi / (m * m) * band.delta_omega * i_band * drift
    return 1.0 + 2.0 * n_band, rate * t


def band_local_variance(band: BandSpec, env: ThermalEnvironment, gc: GreenCoefficients,
                        t: float) -> float:
    """sqrt(det) of the band's cycle-averaged local block (the standard-form a)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    initial, growth = _two_root_det(band, env, gc, t)
    total = initial + growth
    if total <= 0:
        raise ValidityHorizonError("linearized purity invalid; reduce t")
    return total / 2


def band_purity(band: BandSpec, env: ThermalEnvironment, gc: GreenCoefficients,
                t: float) -> float:
    """Purity 1 / (2 sqrt(det alpha)) of the band at time t."""
    return 1.0 / (2.0 * band_local_variance(band, env, gc, t))


def _require(pair: BandPair, relation: str):
    if pair.relation != relation:
        raise RelationError(f"operation needs a {relation} pair, got {pair.relation}")


def _pair_prefactor(pair: BandPair, env: ThermalEnvironment):
    bi, bj = pair.band_i, pair.band_j
    m = env.mass
    return (bi.delta_omega * bj.delta_omega / (m * m)
            * env.density(bi.side).value(bi.omega_center)
            * env.density(bj.side).value(bj.omega_center))


def gamma_plus(pair: BandPair, env: ThermalEnvironment, gc: GreenCoefficients) -> float:
    """Cross generator rate for pair creation (negative: det gamma < 0)."""
    _require(pair, NONRESONANT)
    bi, bj = pair.band_i, pair.band_j
    wi, wj, k = bi.omega_center, bj.omega_center, pair.harmonic
    ni = env.occupation(bi.side, wi)
    nj = env.occupation(bj.side, wj)
    amp = ((2 * ni + 1) * np.conj(gc(-k, 1j * wi))
           + (2 * nj + 1) * np.conj(gc(-k, 1j * wj)))
    return -0.25 * _pair_prefactor(pair, env) * abs(amp) ** 2


def gamma_minus(pair: BandPair, env: ThermalEnvironment, gc: GreenCoefficients) -> float:
    """Cross generator rate for resonant transport (non-negative)."""
    _require(pair, RESONANT)
    bi, bj = pair.band_i, pair.band_j
    wi, wj, k = bi.omega_center, bj.omega_center, pair.harmonic
    ni = env.occupation(bi.side, wi)
    nj = env.occupation(bj.side, wj)
    amp = ni * gc(k, 1j * wi) - nj * np.conj(gc(-k, 1j * wj))
    return _pair_prefactor(pair, env) * abs(amp) ** 2


def cross_generator(pair: BandPair, env: ThermalEnvironment, gc: GreenCoefficients) -> float:
    """Gamma_+ or Gamma_- depending on the relation; zero when uncorrelated."""
    if pair.relation == NONRESONANT:
        return gamma_plus(pair, env, gc)
    if pair.relation == RESONANT:
        return gamma_minus(pair, env, gc)
    return 0.0


def assemble_sigma_av(pair: BandPair, env: ThermalEnvironment, gc: GreenCoefficients,
                      t: float) -> gt.TwoModeCovariance:
    """Cycle-averaged two-band covariance at time t, in standard form."""
    if t < 0:
        raise ValueError("t must be >= 0")
    a = band_local_variance(pair.band_i, env, gc, t)
    b = band_local_variance(pair.band_j, env, gc, t)
    a0 = band_local_variance(pair.band_i, env, gc, 0.0)
    b0 = band_local_variance(pair.band_j, env, gc, 0.0)
    if a0 / a < MIN_PURITY_FRACTION or b0 / b < MIN_PURITY_FRACTION:
        raise ValidityHorizonError("validity horizon exceeded: purity collapsed")
    c = math.sqrt(abs(cross_generator(pair, env, gc))) * t / 2
    if pair.relation == NONRESONANT:
        sigma = gt.TwoModeCovariance.standard(a, b, c, -c)
    elif pair.relation == RESONANT:
        sigma = gt.TwoModeCovariance.standard(a, b, c, c)
    else:
        sigma = gt.TwoModeCovariance.standard(a, b, 0.0, 0.0)
    try:
        gt._checked(sigma)
    except UnphysicalCovarianceError as exc:
        raise ValidityHorizonError(f"validity horizon exceeded: {exc}") from None
    return sigma


def _clip_mu(mu):
    if not 0 < mu <= 1:
        raise ValueError(f"purity must lie in (0, 1], got {mu}")
    return min(mu, _MU_CEIL)


def _sign(relation):
    if relation == NONRESONANT:
        return 1.0
    if relation == RESONANT:
        return -1.0
    raise RelationError(f"closed forms need a correlated pair, got {relation}")


def mutual_information_closed(mu_i: float, mu_j: float, gamma_t: float,
                              relation: str) -> float:
    """f_pm(mu_i, mu_j) |Gamma_pm(t)|."""
    s = _sign(relation)
    if gamma_t == 0:
        return 0.0
    mi, mj = _clip_mu(mu_i), _clip_mu(mu_j)
    if s < 0 and abs(mi - mj) < DEGENERATE_PURITY_TOL:
        raise DegeneratePurityError("degenerate-purity branch: mu_i == mu_j")
    f = mi * mj * (math.atanh(mi) + s * math.atanh(mj)) / (mi + s * mj)
    return f * abs(gamma_t)


def discord_ratio_closed(mu_i: float, mu_j: float, relation: str) -> float:
    """D/I = 1 - g_pm(mu_i, mu_j), clamped to [0, 1]; measurement on band j."""
    s = _sign(relation)
    mi, mj = _clip_mu(mu_i), _clip_mu(mu_j)
    if s < 0 and abs(mi - mj) < DEGENERATE_PURITY_TOL:
        raise DegeneratePurityError("degenerate-purity branch: mu_i == mu_j")
    g = (1.0 / (1.0 + mj)) * (1.0 + s * mj / mi) / (1.0 + s * math.atanh(mj) / math.atanh(mi))
    return min(max(1.0 - g, 0.0), 1.0)


REGIMES = ("similar-T", "cold-L", "cold-R")


def discord_regime_limits(mu_i: float, mu_j: float, relation: str, regime: str) -> float:
    """Approximate D/I in the limiting temperature regimes.

    Each regime is bounded to where its formula stays within 10% of
    ``discord_ratio_closed``:

    similar-T  |mu_i - mu_j| / mu_bar < 0.1, plus mu_bar < 0.75 for nonresonant
               pairs (the spread is amplified by atanh as mu_bar -> 1)
    cold-L     mu_j > 0.99 and mu_i < 0.5 (left band cold, right hot)
    cold-R     mu_i > 1 - 1e-6 and mu_j < 0.02, resonant pairs only; the
               correction is ~ 1 / (2 atanh mu_i - 1), so convergence is logarithmic
    """
    _sign(relation)
    mi, mj = _clip_mu(mu_i), _clip_mu(mu_j)
    if regime == "similar-T":
        mbar = (mi + mj) / 2
        spread = abs(mi - mj) / mbar
        if spread >= 0.1:
            raise RegimeError(f"similar-T needs |dmu|/mu_bar < 0.1, got {spread:.3g}")
        if relation == NONRESONANT:
            if mbar >= 0.75:
                raise RegimeError(f"similar-T (nonresonant) needs mu_bar < 0.75, got {mbar:.6g}")
            return mbar / (1 + mbar)
        return 1 - (1 - mbar) * math.atanh(mbar) / mbar
    if regime == "cold-L":
        if mj <= 0.99:
            raise RegimeError(f"cold-L needs mu_j > 0.99, got {mj:.6g}")
        if mi >= 0.5:
            raise RegimeError(f"cold-L needs mu_i < 0.5, got {mi:.6g}")
        return 1 - mj / (2 * math.atanh(mj))
    if regime == "cold-R":
        if relation != RESONANT:
            raise RegimeError("cold-R limit is only available for resonant pairs")
        if mi <= 1 - 1e-6:
            raise RegimeError(f"cold-R needs mu_i > 1 - 1e-6, got {mi:.12g}")
        if mj >= 0.02:
            raise RegimeError(f"cold-R needs mu_j < 0.02, got {mj:.6g}")
        return 2 * mj / mi
    raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")


class NegativityResult(NamedTuple):
    E_N: float
    S_ij: float
    Gamma_N: float
    t_ent: float
    flags: tuple = ()


def _threshold(mi, mj):
    return 0.5 * math.log((mi * mi + mj * mj) / (2 * mi * mi * mj * mj))


def entanglement_threshold_renyi(block_i, block_j) -> float:
    """S_ij rebuilt from the Renyi-2 entropies: mean entropy plus ln cosh(difference) / 2."""
    s_i = gt.renyi2_entropy(block_i)
    s_j = gt.renyi2_entropy(block_j)
    diff = s_i - s_j
    return (s_i + s_j) / 2 + (np.logaddexp(diff, -diff) - math.log(2)) / 2


def negativity_closed(mu_i: float, mu_j: float, gamma_plus_rate: float, t: float,
                      relation: str = NONRESONANT) -> NegativityResult:
    """E_N = max(0, -S_ij + Gamma_N t) together with S_ij, Gamma_N and t_ent."""
    mi, mj = _clip_mu(mu_i), _clip_mu(mu_j)
    s_ij = max(_threshold(mi, mj), 0.0)
    if relation == RESONANT:
        return NegativityResult(0.0, s_ij, 0.0, math.inf, ("resonant-not-entangled",))
    _sign(relation)
    g_n = (mi + mj) * math.exp(-2 * s_ij) * math.sqrt(abs(gamma_plus_rate)) / (2 * mi * mj)
    t_ent = s_ij / g_n if g_n > 0 else math.inf
    return NegativityResult(max(0.0, -s_ij + g_n * t), s_ij, g_n, t_ent)


def kl_divergence_proxy(mu_i: float, mu_j: float, gamma_rate: float, t: float) -> float:
    """mu_i mu_j |Gamma_pm| t^2: phase-space distinguishability from the product state."""
    return mu_i * mu_j * abs(gamma_rate) * t * t


def generator_negativity_identity(E_N: float, S_ij: float, Gamma_N: float,
                                  gamma_plus_rate: float, t: float) -> float:
    """| |Gamma_+| t^2 - (|Gamma_+| / Gamma_N^2) (E_N + S_ij)^2 | for t past t_ent."""
    if Gamma_N <= 0 or t <= S_ij / Gamma_N:
        raise ValueError("identity only holds for t > t_ent")
    g = abs(gamma_plus_rate)
    return abs(g * t * t - g / Gamma_N**2 * (E_N + S_ij) ** 2)


def bound_check_ineq(mu_i: float, mu_j: float, gamma_minus_rate: float, t: float) -> bool:
    """|Gamma_-| t^2 <= (1 - mu_i)(1 - mu_j) / (mu_i mu_j)."""
    return abs(gamma_minus_rate) * t * t <= (1 - mu_i) * (1 - mu_j) / (mu_i * mu_j)


def normalization_E0(sd: SpectralDensity, gc: GreenCoefficients, delta_omega: float,
                     t: float) -> float:
    """E0 = gamma0 * delta_omega * V * t / omega_r^3 with V the cosine amplitude."""
    amp = 2 * abs(gc.driving.fourier_coeffs.get(1, 0.0))
    return sd.gamma0 * delta_omega * amp * t / gc.driving.omega_r**3


@dataclass
class CorrelationReport:
    """Everything known about one band pair at one time."""

    t: float
    relation: str
    mu_i: float
    mu_j: float
    Gamma: float
    I: float
    D: float
    D_over_I: float
    E_N: float
    S_ij: float
    Gamma_N: float
    t_ent: float
    Q_dot_i: float
    Q_dot_j: float
    E0: float
    I_exact: float = math.nan
    D_exact: float = math.nan
    E_N_exact: float = math.nan
    flags: list = field(default_factory=list)


def correlation_report(pair: BandPair, env: ThermalEnvironment, gc: GreenCoefficients,
                       t: float, measured_side: str = "j", exact: bool = True
                       ) -> CorrelationReport:
    """Closed-form measures for one pair, with exact values from the assembled state."""
    flags = list(gc.warnings and ["truncation-or-perturbation-warning"])
    sigma = assemble_sigma_av(pair, env, gc, t)
    mu_i = band_purity(pair.band_i, env, gc, t)
    mu_j = band_purity(pair.band_j, env, gc, t)
    rate = cross_generator(pair, env, gc)
    gamma_t = rate * t * t
    dw = pair.band_i.delta_omega
    e0 = normalization_E0(env.density_R, gc, dw, t)
    q_i = heat_current(pair.band_i, env, gc) * pair.band_i.delta_omega
    q_j = heat_current(pair.band_j, env, gc) * pair.band_j.delta_omega

    if exact:
        i_ex = gt.mutual_information_exact(sigma)
        d_ex = gt.gaussian_discord_exact(sigma, measured_side)
        en_ex = gt.log_negativity_exact(sigma)
    else:
        i_ex = d_ex = en_ex = math.nan

    if pair.relation == UNCORRELATED:
        return CorrelationReport(t, pair.relation, mu_i, mu_j, 0.0, 0.0, 0.0, 0.0, 0.0,
                                 0.0, 0.0, math.inf, q_i, q_j, e0, i_ex, d_ex, en_ex, flags)
    try:
        info = mutual_information_closed(mu_i, mu_j, gamma_t, pair.relation)
        ratio = discord_ratio_closed(mu_i, mu_j, pair.relation)
        disc = ratio * info
    except DegeneratePurityError:
        flags.append("degenerate-purity branch")
        info = gt.mutual_information_exact(sigma)
        disc = gt.gaussian_discord_exact(sigma, measured_side)
        ratio = disc / info if info > 0 else 0.0
    neg = negativity_closed(mu_i, mu_j, rate, t, pair.relation)
    flags.extend(neg.flags)
    return CorrelationReport(t, pair.relation, mu_i, mu_j, gamma_t, info, disc, ratio,
                             neg.E_N, neg.S_ij, neg.Gamma_N, neg.t_ent, q_i, q_j, e0,
                             i_ex, d_ex, en_ex, flags)
