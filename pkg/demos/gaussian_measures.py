"""
Correlation measures of two-mode Gaussian states
================================================

Mutual information, Gaussian discord and log negativity for a few
reference states, built directly from their covariance matrices.
"""

import math

import numpy as np

from envcorr import gaussian as gt

# A two-mode squeezed vacuum is pure: its discord equals the marginal entropy
# and its log negativity is twice the squeezing.
for r in (0.1, 0.5, 1.0):
    tmsv = gt.two_mode_squeezed_vacuum(r)
    print(f"TMSV r={r:.1f}  I={gt.mutual_information_exact(tmsv):.6f}"
          f"  D={gt.gaussian_discord_exact(tmsv):.6f}"
          f"  E_N={gt.log_negativity_exact(tmsv):.6f}"
          f"  S(marginal)={gt.entropy_f(math.cosh(2 * r) / 2):.6f}")

# Mixing in thermal noise removes entanglement long before it removes discord.
# Standard form: a, b on the diagonal blocks and cross block diag(c, -c).
c = 0.6
for a in (0.8, 1.0, 1.2, 1.6):
    sigma = gt.TwoModeCovariance.standard(a, a, c, -c)
    value, emin, branch = gt.discord_details(sigma, "j")
    print(f"a={a:.1f}  E_N={gt.log_negativity_exact(sigma):.4f}"
          f"  D={value:.4f} ({branch})  I={gt.mutual_information_exact(sigma):.4f}")

# The invariants are local-symplectic invariants: squeezing one mode does not
# change any of the measures.
sigma = gt.TwoModeCovariance.standard(1.2, 0.9, 0.5, -0.4)
s = np.diag([math.exp(0.7), math.exp(-0.7), 1.0, 1.0])
squeezed = gt.TwoModeCovariance.from_matrix(s @ sigma.matrix @ s.T)
print("I before/after local squeeze:",
      gt.mutual_information_exact(sigma), gt.mutual_information_exact(squeezed))
