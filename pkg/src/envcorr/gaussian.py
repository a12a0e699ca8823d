"""
Two-mode Gaussian states: standard form, symplectic spectra and the exact
correlation measures (mutual information, Gaussian discord, log-negativity).

Conventions: hbar = 1, vacuum quadrature variance 1/2, natural logarithms.
Covariance ordering is (q_i, p_i, q_j, p_j), so

    sigma = [[alpha, gamma],
             [gamma^T, beta]]

Near-pure states sit a hair above the vacuum boundary (lambda - 1/2 can be
1e-10 or smaller), and several of the exact expressions subtract quantities
of order one to get there.  All determinant algebra is therefore done in a
private 50-digit mpmath context; public functions return floats.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import InvariantInconsistencyError, UnphysicalCovarianceError

__all__ = [
    "TwoModeCovariance",
    "SymplecticInvariants",
    "to_standard_form",
    "symplectic_invariants",
    "symplectic_eigenvalues",
    "ppt_eigenvalue",
    "entropy_f",
    "entropy_f_prime",
    "mutual_information_exact",
    "gaussian_discord_exact",
    "discord_details",
    "log_negativity_exact",
    "renyi2_entropy",
    "purity",
    "thermal_product",
    "two_mode_squeezed_vacuum",
]

# fixed precision, never mutated after import -> safe for concurrent readers
_mp = mpmath.MPContext()
_mp.dps = 50

DISCRIMINANT_TOL = 1e-14
PHYSICAL_TOL = 1e-12
_QUARTER = _mp.mpf(1) / 4
_HALF = _mp.mpf(1) / 2


@dataclass(frozen=True)
class TwoModeCovariance:
    """Covariance matrix of two bosonic modes, stored by 2x2 blocks."""

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            block = np.array(getattr(self, name), dtype=float)
            if block.shape != (2, 2):
                raise ValueError(f"{name} must be 2x2, got shape {block.shape}")
            block.setflags(write=False)
            object.__setattr__(self, name, block)
        for name in ("alpha", "beta"):
            block = getattr(self, name)
            if not np.isclose(block[0, 1], block[1, 0], rtol=1e-12, atol=1e-15):
                raise ValueError(f"{name} block is not symmetric")

    @classmethod
    def from_matrix(cls, sigma) -> "TwoModeCovariance":
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got {sigma.shape}")
        if not np.allclose(sigma, sigma.T, rtol=1e-12, atol=1e-15):
            raise ValueError("covariance matrix is not symmetric")
        return cls(sigma[:2, :2], sigma[2:, 2:], sigma[:2, 2:])

    @classmethod
    def standard(cls, a, b, c1, c2) -> "TwoModeCovariance":
        """Standard form with local blocks a*1, b*1 and cross block diag(c1, c2)."""
        return cls(np.eye(2) * a, np.eye(2) * b, np.diag([c1, c2]))

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.alpha, self.gamma], [self.gamma.T, self.beta]])

    def swapped(self) -> "TwoModeCovariance":
        """Exchange the roles of the two modes."""
        return TwoModeCovariance(self.beta, self.alpha, self.gamma.T)

    def partial_transpose(self) -> "TwoModeCovariance":
        """Covariance of the partially transposed state (p_j -> -p_j)."""
        flip = np.diag([1.0, -1.0])
        return TwoModeCovariance(self.alpha, flip @ self.beta @ flip, self.gamma @ flip)

    def conjugate(self, s_i, s_j) -> "TwoModeCovariance":
        """Apply local symplectic maps S_i (+) S_j."""
        s_i = np.asarray(s_i, dtype=float)
        s_j = np.asarray(s_j, dtype=float)
        return TwoModeCovariance(s_i @ self.alpha @ s_i.T, s_j @ self.beta @ s_j.T,
                                 s_i @ self.gamma @ s_j.T)


@dataclass(frozen=True)
class SymplecticInvariants:
    """Local-symplectic invariants of a two-mode covariance matrix.

    Fields are 50-digit mpmath numbers; wrap them in ``float`` for display.
    """

    A: object
    B: object
    C: object
    D: object

    @property
    def delta(self):
        return self.A + self.B + 2 * self.C

    @property
    def delta_tilde(self):
        return self.A + self.B - 2 * self.C


def _det2(m):
    m = [[_mp.mpf(float(x)) for x in row] for row in m]
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def symplectic_invariants(sigma: TwoModeCovariance) -> SymplecticInvariants:
    """Return A = det alpha, B = det beta, C = det gamma and D = det sigma."""
    big = _mp.matrix([[float(x) for x in row] for row in sigma.matrix])
    return SymplecticInvariants(
        A=_det2(sigma.alpha), B=_det2(sigma.beta), C=_det2(sigma.gamma), D=_mp.det(big)
    )


def _discriminant(delta, det):
    disc = delta * delta - 4 * det
    if disc < 0:
        if disc < -DISCRIMINANT_TOL:
            raise InvariantInconsistencyError(
                f"invariant inconsistency: discriminant {float(disc):.3e} < 0"
            )
        disc = _mp.zero
    return disc


def _eigs_mp(inv: SymplecticInvariants):
    delta = inv.delta
    root = _mp.sqrt(_discriminant(delta, inv.D))
    big = (delta + root) / 2
    # the minus root loses everything to cancellation when A >> B; use D instead
    small = inv.D / big if big > 0 else _mp.zero
    return _mp.sqrt(big), _mp.sqrt(max(small, _mp.zero))


def _ppt_mp(inv: SymplecticInvariants):
    delta = inv.delta_tilde
    root = _mp.sqrt(_discriminant(delta, inv.D))
    big = (delta + root) / 2
    small = inv.D / big if big > 0 else _mp.zero
    return _mp.sqrt(max(small, _mp.zero))


def symplectic_eigenvalues(inv: SymplecticInvariants) -> tuple[float, float]:
    """Symplectic eigenvalues (lambda_1 >= lambda_2) from the invariants."""
    l1, l2 = _eigs_mp(inv)
    return float(l1), float(l2)


def ppt_eigenvalue(inv: SymplecticInvariants) -> float:
    """Smallest symplectic eigenvalue of the partially transposed state."""
    return float(_ppt_mp(inv))


def _f(x):
    x = _mp.mpf(x)
    if x < _HALF:
        if x < _HALF - PHYSICAL_TOL:
            raise UnphysicalCovarianceError(
                f"unphysical covariance: symplectic eigenvalue {float(x)!r} < 1/2"
            )
        x = _HALF
    lo = x - _HALF
    hi = x + _HALF
    if lo == 0:
        return hi * _mp.log(hi)
    return hi * _mp.log(hi) - lo * _mp.log(lo)


def entropy_f(x) -> float:
    """Von Neumann entropy of a single mode with symplectic eigenvalue x."""
    return float(_f(x))


def entropy_f_prime(x) -> float:
    """Derivative of ``entropy_f``: ln[(x + 1/2)/(x - 1/2)] = 2 atanh(1/2x)."""
    x = _mp.mpf(x)
    if x <= _HALF:
        return float("inf")
    return float(2 * _mp.atanh(1 / (2 * x)))


def _checked(sigma: TwoModeCovariance):
    inv = symplectic_invariants(sigma)
    if inv.A <= 0 or inv.B <= 0:
        raise UnphysicalCovarianceError("unphysical covariance: local determinant <= 0")
    l1, l2 = _eigs_mp(inv)
    if l2 < _HALF - PHYSICAL_TOL:
        raise UnphysicalCovarianceError(
            f"unphysical covariance: lambda_2 = {float(l2)!r} < 1/2"
        )
    return inv, l1, l2


def to_standard_form(sigma: TwoModeCovariance) -> tuple[float, float, float, float]:
    """Return (a, b, c1, c2) of the local-symplectically equivalent standard form.

    Ties are broken with |c1| >= |c2| and c1 >= 0; the sign of det(gamma) ends
    up on c2.
    """
    inv, _, _ = _checked(sigma)
    a = _mp.sqrt(inv.A)
    b = _mp.sqrt(inv.B)
    ab = a * b
    # c1 c2 = C and (ab - c1^2)(ab - c2^2) = D
    total = (inv.A * inv.B + inv.C**2 - inv.D) / ab
    disc = total**2 - 4 * inv.C**2
    if disc < 0:
        disc = _mp.zero
    root = _mp.sqrt(disc)
    big = max((total + root) / 2, _mp.zero)
    c1 = _mp.sqrt(big)
    if c1 == 0:
        c2 = _mp.zero
    else:
        c2 = inv.C / c1
    return float(a), float(b), float(c1), float(c2)


def mutual_information_exact(sigma: TwoModeCovariance) -> float:
    """f(sqrt A) + f(sqrt B) - f(lambda_1) - f(lambda_2)."""
    inv, l1, l2 = _checked(sigma)
    value = _f(_mp.sqrt(inv.A)) + _f(_mp.sqrt(inv.B)) - _f(l1) - _f(l2)
    if abs(value) < _mp.mpf(10) ** -30:
        # product states: rounding at the 50th digit
        return 0.0
    return float(value)


def _emin(inv: SymplecticInvariants):
    """Optimal conditional determinant for a Gaussian measurement on mode j."""
    A, B, C, D = inv.A, inv.B, inv.C, inv.D
    gap = _QUARTER - B
    if abs(gap) < _mp.mpf(10) ** -40:
        # measured mode is pure: closed limit of the quotient
        return (_mp.sqrt(A) - abs(C) / (_HALF + _mp.sqrt(B))) ** 2, "pure-measured-mode"
    if 4 * (D - A * B) ** 2 <= (1 + 4 * B) * C**2 * (A + 4 * D):
        inner = C**2 + gap * (A - 4 * D)
        inner = max(inner, _mp.zero)
        num = 2 * C**2 + gap * (A - 4 * D) + 2 * abs(C) * _mp.sqrt(inner)
        return num / (4 * gap**2), "quotient"
    inner = C**4 + (D - A * B) ** 2 - 2 * C**2 * (A * B + D)
    inner = max(inner, _mp.zero)
    return (A * B - C**2 + D - _mp.sqrt(inner)) / (2 * B), "heterodyne-like"


def discord_details(sigma: TwoModeCovariance, measured_side: str = "j"):
    """Gaussian discord plus the optimal E_min and which branch produced it.

    Returns ``(discord, E_min, branch)``.  ``measured_side`` names the mode on
    which the Gaussian measurement is performed.
    """
    if measured_side not in ("i", "j"):
        raise ValueError("measured_side must be 'i' or 'j'")
    if measured_side == "i":
        sigma = sigma.swapped()
    inv, l1, l2 = _checked(sigma)
    emin, branch = _emin(inv)
    value = _f(_mp.sqrt(inv.B)) - _f(l1) - _f(l2) + _f(_mp.sqrt(emin))
    return float(value), float(emin), branch


def gaussian_discord_exact(sigma: TwoModeCovariance, measured_side: str = "j") -> float:
    """Gaussian quantum discord with the measurement on ``measured_side``."""
    return discord_details(sigma, measured_side)[0]


def log_negativity_exact(sigma: TwoModeCovariance) -> float:
    """max{0, -ln(2 * lowest symplectic eigenvalue of the partial transpose)}."""
    inv, _, _ = _checked(sigma)
    lt = _ppt_mp(inv)
    value = -_mp.log(2 * lt)
    if value < _mp.mpf(10) ** -30:
        # separable, or rounding at the 50th digit
        return 0.0
    return float(value)


def renyi2_entropy(block) -> float:
    """Renyi-2 entropy ln(2 sqrt(det)) of a single-mode covariance block."""
    det = _det2(np.asarray(block, dtype=float))
    if det <= 0:
        raise UnphysicalCovarianceError("single-mode block has det <= 0")
    return float(_mp.log(2 * _mp.sqrt(det)))


def purity(block) -> float:
    """Purity tr(rho^2) = 1 / (2 sqrt(det)) of a single-mode block."""
    det = _det2(np.asarray(block, dtype=float))
    if det <= 0:
        raise UnphysicalCovarianceError("single-mode block has det <= 0")
    return float(1 / (2 * _mp.sqrt(det)))


def thermal_product(nu_i: float, nu_j: float) -> TwoModeCovariance:
    """Uncorrelated thermal modes with symplectic eigenvalues nu_i, nu_j."""
    return TwoModeCovariance.standard(nu_i, nu_j, 0.0, 0.0)


def two_mode_squeezed_vacuum(r: float) -> TwoModeCovariance:
    """Two-mode squeezed vacuum with squeezing parameter r."""
    a = np.cosh(2 * r) / 2
    c = np.sinh(2 * r) / 2
    return TwoModeCovariance.standard(a, a, c, -c)
