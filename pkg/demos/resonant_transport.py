"""
Resonant transport and thermal interference
===========================================

Bands separated by one driving quantum, omega_j = omega_i + omega_d, exchange
excitations.  The correlations stay separable and bounded, and when both
reservoirs have the same temperature the two transport channels interfere
and almost cancel.
"""

from envcorr import bands as bc
from envcorr.sweep import run_sweep, scenario_config

peaks = {}
for name in ("transport-hot-right", "transport-hot-left", "transport-hot-both"):
    cfg = scenario_config(name)
    res = run_sweep(cfg)
    reports = [r.report for r in res.rows]
    peaks[name] = float(res.summary["max_I_over_E0sq"])
    print(f"{name}: T_R={cfg.T_R} T_L={cfg.T_L}")
    print(f"  max I/E0^2 = {peaks[name]:.4e}")
    print(f"  max I = {max(r.I for r in reports):.3e} (bounded by 1),"
          f" entangled points: {sum(r.E_N_exact > 0 for r in reports)}")
    print(f"  rate inequality holds at {res.summary['bound_check_pass']} points")

print(f"\nequal temperatures suppress the peak by a factor of"
      f" {peaks['transport-hot-right'] / peaks['transport-hot-both']:.0f}")

# Far from equal temperatures the discord fraction follows simple limits.
mu_cold, mu_hot = 1 - 1e-9, 0.01
print("cold right, hot left: D/I =",
      bc.discord_ratio_closed(mu_cold, mu_hot, bc.RESONANT),
      "approx", bc.discord_regime_limits(mu_cold, mu_hot, bc.RESONANT, "cold-R"))
