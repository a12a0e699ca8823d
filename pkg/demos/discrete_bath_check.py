"""
Checking the band rates against a finite bath
=============================================

Both reservoirs are replaced by 400 oscillators each and the whole Gaussian
state is propagated exactly (a one-period Floquet map, then matrix powers).
The growth of pair and transport correlations, the heat currents and the
purity slopes fitted from the trajectory are compared with the analytic
band rates.  Takes a few minutes on one core.
"""

from envcorr.oracle import run_reference_comparison

# A reduced scale separation (omega_r = 50 instead of 800) keeps the bath
# small enough to propagate; the right reservoir is warm so that the transport
# channel is active.
table = run_reference_comparison(omega_r=50.0, n_modes=400, T_R=20.0)
print(f"{'quantity':24s}{'fitted':>14s}{'predicted':>14s}{'rel dev':>10s}")
for row in table:
    print(f"{row['quantity']:24s}{row['fitted']:14.5e}{row['predicted']:14.5e}"
          f"{row['rel_dev']:10.2e}")
