"""
Frequency sweeps over band pairs, CSV output and validation reports.

A config is a flat ``key = value`` document (``#`` starts a comment).  All
physical parameters are in units where gamma0 = 1; a ``scenario`` key
pulls in one of the preset temperature/relation combinations first, and
later keys override it.
"""
from __future__ import annotations

import io
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import bands as bc
from . import gaussian as gt
from .errors import ConfigError, ValidityHorizonError
from .green import DrivingSpec, SpectralDensity, solve_green_coefficients

__all__ = [
    "SweepConfig",
    "SweepRow",
    "SweepResult",
    "SCENARIOS",
    "CSV_COLUMNS",
    "parse_config",
    "scenario_config",
    "run_sweep",
    "run_validation",
    "ValidationReport",
]

SCENARIOS = {
    "pair-cold": {"relation": "nonresonant", "T_R": 0.0, "T_L": 0.0},
    "pair-hot-right": {"relation": "nonresonant", "T_R": 7.5, "T_L": 0.0},
    "pair-hot-left": {"relation": "nonresonant", "T_R": 0.0, "T_L": 7.5},
    "pair-hot-both": {"relation": "nonresonant", "T_R": 7.5, "T_L": 7.5},
    "transport-hot-right": {"relation": "resonant", "T_R": 1500.0, "T_L": 0.0},
    "transport-hot-left": {"relation": "resonant", "T_R": 0.0, "T_L": 1500.0},
    "transport-hot-both": {"relation": "resonant", "T_R": 7500.0, "T_L": 7500.0},
}


@dataclass(frozen=True)
class SweepConfig:
    omega_r: float = 800.0
    omega_d: float | None = None
    V: float | None = None
    gamma0: float = 1.0
    cutoff: float | None = None
    m: float = 10.0
    m_i: float = 1.0
    delta_omega: float = 0.02
    T_R: float = 0.0
    T_L: float = 0.0
    t: float = 20.0
    relation: str = "nonresonant"
    harmonic: int = 1
    order: int = 2
    omega_i_min: float | None = None
    omega_i_max: float | None = None
    n_points: int = 101
    out: str = "sweep.csv"
    oracle: bool = False
    measured_side: str = "j"
    workers: int = 1
    scenario: str = ""

    def __post_init__(self):
        # defaults that depend on other fields
        if self.omega_d is None:
            object.__setattr__(self, "omega_d", self.omega_r / math.sqrt(11))
        if self.V is None:
            object.__setattr__(self, "V", self.omega_r**2 / 32)
        if self.cutoff is None:
            object.__setattr__(self, "cutoff", 10 * self.omega_r)
        span = self.harmonic * self.omega_d if self.relation == "nonresonant" else self.omega_d
        if self.omega_i_min is None:
            object.__setattr__(self, "omega_i_min", 0.01 * span)
        if self.omega_i_max is None:
            object.__setattr__(self, "omega_i_max", 0.99 * span)
        self.validate()

    def validate(self):
        for key in ("omega_r", "omega_d", "gamma0", "cutoff", "m", "m_i", "delta_omega",
                    "omega_i_min", "omega_i_max"):
            if not getattr(self, key) > 0:
                raise ConfigError(key, "must be > 0")
        for key in ("T_R", "T_L", "t", "V"):
            if getattr(self, key) < 0:
                raise ConfigError(key, "must be >= 0")
        if self.relation not in ("nonresonant", "resonant"):
            raise ConfigError("relation", "must be 'nonresonant' or 'resonant'")
        if self.harmonic < 1 and self.relation == "nonresonant":
            raise ConfigError("harmonic", "must be >= 1 for nonresonant pairs")
        if self.order < 0:
            raise ConfigError("order", "must be >= 0")
        if self.n_points < 2:
            raise ConfigError("n_points", "must be >= 2")
        if self.omega_i_max <= self.omega_i_min:
            raise ConfigError("omega_i_max", "grid must be strictly increasing")
        if self.relation == "nonresonant" and self.omega_i_max >= self.harmonic * self.omega_d:
            raise ConfigError("omega_i_max", "nonresonant sweeps need omega_i < k omega_d")
        if self.measured_side not in ("i", "j"):
            raise ConfigError("measured_side", "must be 'i' or 'j'")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.omega_i_min, self.omega_i_max, self.n_points)

    def environment(self) -> bc.ThermalEnvironment:
        dens = [SpectralDensity(self.gamma0, self.cutoff, self.m, self.m_i, side)
                for side in ("R", "L")]
        return bc.ThermalEnvironment(self.T_R, self.T_L, dens[0], dens[1])

    def driving(self) -> DrivingSpec:
        return DrivingSpec.cosine(self.omega_r, self.omega_d, self.V)


_FIELD_TYPES = {f.name: f.type for f in fields(SweepConfig)}
_INT_KEYS = {"harmonic", "order", "n_points", "workers"}
_BOOL_KEYS = {"oracle"}
_STR_KEYS = {"relation", "out", "measured_side", "scenario"}


def _convert(key, raw):
    raw = raw.strip()
    try:
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if key in _INT_KEYS:
            return int(raw)
        if key in _STR_KEYS:
            return raw.strip("\"'")
        return float(raw)
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r}") from None


def parse_config(text: str, **overrides) -> SweepConfig:
    """Parse a flat key-value document into a validated config."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(key, "unknown key")
        values[key] = _convert(key, raw)
    values.update({k: v for k, v in overrides.items() if v is not None})
    merged = dict(SCENARIOS.get(values.get("scenario", ""), {}))
    if values.get("scenario") and values["scenario"] not in SCENARIOS:
        raise ConfigError("scenario", f"unknown scenario; choose from {sorted(SCENARIOS)}")
    merged.update(values)
    try:
        return SweepConfig(**merged)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None


def scenario_config(name: str, **overrides) -> SweepConfig:
    if name not in SCENARIOS:
        raise ConfigError("scenario", f"unknown scenario {name!r}")
    return SweepConfig(**{**SCENARIOS[name], "scenario": name, **overrides})


CSV_COLUMNS = (
    "omega_i", "omega_j", "mu_i", "mu_j", "Gamma", "I_over_E0sq", "D_over_E0sq",
    "D_over_I", "E_N_over_E0", "S_ij", "t_ent", "Q_dot_i", "flags",
    "I", "D", "E_N", "Q_dot_j", "E0", "I_exact", "D_exact", "E_N_exact",
)


@dataclass
class SweepRow:
    omega_i: float
    omega_j: float
    report: bc.CorrelationReport | None
    flags: list = field(default_factory=list)

    def values(self) -> dict:
        nan = math.nan
        r = self.report
        if r is None:
            base = {c: nan for c in CSV_COLUMNS}
        else:
            e0 = r.E0
            base = {
                "mu_i": r.mu_i, "mu_j": r.mu_j, "Gamma": r.Gamma,
                "I_over_E0sq": r.I / e0**2, "D_over_E0sq": r.D / e0**2,
                "D_over_I": r.D_over_I, "E_N_over_E0": r.E_N / e0, "S_ij": r.S_ij,
                "t_ent": r.t_ent, "Q_dot_i": r.Q_dot_i, "I": r.I, "D": r.D,
                "E_N": r.E_N, "Q_dot_j": r.Q_dot_j, "E0": e0, "I_exact": r.I_exact,
                "D_exact": r.D_exact, "E_N_exact": r.E_N_exact,
            }
        base["omega_i"] = self.omega_i
        base["omega_j"] = self.omega_j
        base["flags"] = ";".join(self.flags)
        return base


@dataclass
class SweepResult:
    config: SweepConfig
    rows: list
    summary: dict

    def csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows:
            vals = row.values()
            cells = []
            for col in CSV_COLUMNS:
                v = vals[col]
                cells.append(v if isinstance(v, str) else "%.12g" % v)
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()

    def summary_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.summary.items())

    @property
    def flagged_fraction(self) -> float:
        bad = sum(1 for r in self.rows if r.report is None)
        return bad / len(self.rows) if self.rows else 0.0


def _pair(cfg: SweepConfig, omega_i: float) -> bc.BandPair:
    if cfg.relation == "nonresonant":
        return bc.BandPair.nonresonant(omega_i, cfg.omega_d, cfg.delta_omega, cfg.harmonic)
    return bc.BandPair.resonant(omega_i, cfg.omega_d, cfg.delta_omega, cfg.harmonic)


def _evaluate(cfg, env, gc, omega_i):
    pair = _pair(cfg, omega_i)
    flags = []
    try:
        report = bc.correlation_report(pair, env, gc, cfg.t, cfg.measured_side)
        flags.extend(report.flags)
        if pair.relation == bc.RESONANT:
            rate = bc.gamma_minus(pair, env, gc)
            if not bc.bound_check_ineq(report.mu_i, report.mu_j, rate, cfg.t):
                flags.append("bound-violated")
    except ValidityHorizonError as exc:
        report = None
        flags.append("validity-horizon: " + str(exc).replace(",", " "))
    return SweepRow(omega_i, pair.band_j.omega_center, report, flags)


def _rel_dev(a, b):
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return abs(a - b) / abs(b)


def _summarize(cfg: SweepConfig, rows) -> dict:
    good = [r for r in rows if r.report is not None]
    s = {
        "scenario": cfg.scenario or "custom",
        "relation": cfg.relation,
        "harmonic": cfg.harmonic,
        "points": len(rows),
        "flagged": len(rows) - len(good),
    }
    if not good:
        return s
    i_vals = np.array([r.report.I for r in good])
    en_vals = np.array([r.report.E_N for r in good])
    e0 = good[0].report.E0
    k_i = int(np.argmax(i_vals))
    s["peak_omega_i_I"] = "%.12g" % good[k_i].omega_i
    s["max_I_over_E0sq"] = "%.12g" % (i_vals[k_i] / e0**2)
    k_e = int(np.argmax(en_vals))
    if en_vals[k_e] > 0:
        s["peak_omega_i_E_N"] = "%.12g" % good[k_e].omega_i
    s["max_E_N_over_E0"] = "%.12g" % (en_vals[k_e] / e0)
    dev = {"I": 0.0, "D": 0.0, "E_N": 0.0}
    for r in good:
        rep = r.report
        if rep.I_exact > 0:
            dev["I"] = max(dev["I"], _rel_dev(rep.I, rep.I_exact))
        if rep.D_exact > 0:
            dev["D"] = max(dev["D"], _rel_dev(rep.D, rep.D_exact))
        if rep.E_N_exact > 0.05:
            dev["E_N"] = max(dev["E_N"], _rel_dev(rep.E_N, rep.E_N_exact))
    for k, v in dev.items():
        s[f"closed_vs_exact_max_dev_{k}"] = "%.6g" % v
    if cfg.relation == "resonant":
        passed = sum(1 for r in good if "bound-violated" not in r.flags)
        s["bound_check_pass"] = f"{passed}/{len(good)}"
    return s


def run_sweep(cfg: SweepConfig, write: bool = False) -> SweepResult:
    """Evaluate every grid point; rows stay in grid order whatever the worker count."""
    env = cfg.environment()
    gc = solve_green_coefficients(env.densities, cfg.driving(), cfg.order)
    grid = [float(w) for w in cfg.grid]
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            rows = list(pool.map(lambda w: _evaluate(cfg, env, gc, w), grid))
    else:
        rows = [_evaluate(cfg, env, gc, w) for w in grid]
    if gc.warnings:
        for row in rows:
            row.flags.append("green-warning")
    result = SweepResult(cfg, rows, _summarize(cfg, rows))
    if write:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(result.csv_text())
    return result


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    def add(self, name, passed, detail=""):
        self.checks.append((name, bool(passed), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    @property
    def first_failure(self):
        return next((name for name, ok, _ in self.checks if not ok), None)

    def text(self) -> str:
        return "".join(f"{name} = {'pass' if ok else 'FAIL'}  {detail}\n"
                       for name, ok, detail in self.checks)


def identity_fuzz(n: int = 1000, seed: int = 0) -> float:
    """Largest relative residual of the generator-negativity identity on random inputs."""
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(n):
        mu_i = rng.uniform(0.05, 1.0)
        mu_j = rng.uniform(0.05, 1.0)
        rate = -10 ** rng.uniform(-14, -2)
        neg = bc.negativity_closed(mu_i, mu_j, rate, 1.0)
        t = neg.t_ent * rng.uniform(1.01, 10.0) if neg.t_ent > 0 else rng.uniform(0.1, 10)
        neg = bc.negativity_closed(mu_i, mu_j, rate, t)
        res = bc.generator_negativity_identity(neg.E_N, neg.S_ij, neg.Gamma_N, rate, t)
        worst = max(worst, res / (abs(rate) * t * t))
    return worst


def run_validation(cfg: SweepConfig, seed: int = 0, oracle: bool | None = None
                   ) -> ValidationReport:
    """Invariant checks around ``cfg``; set ``oracle`` to include the discrete bath run."""
    rep = ValidationReport()

    sweep = run_sweep(cfg)
    devs = [float(sweep.summary.get(f"closed_vs_exact_max_dev_{k}", 0)) for k in ("I", "D", "E_N")]
    rep.add("closed_vs_exact", max(devs) <= 0.05, f"max deviation {max(devs):.3g}")
    rep.add("validity_horizon", sweep.flagged_fraction <= 0.5,
            f"{sweep.summary['flagged']} of {len(sweep.rows)} rows flagged")

    cold = replace(cfg, **SCENARIOS["pair-cold"], scenario="pair-cold", omega_i_min=None,
                   omega_i_max=None, harmonic=1)
    ratios = [r.report.D_exact / r.report.I_exact for r in run_sweep(cold).rows
              if r.report is not None and r.report.E_N_exact > 0]
    lo, hi = (min(ratios), max(ratios)) if ratios else (math.nan, math.nan)
    rep.add("zero_temperature_discord_ratio", bool(ratios) and 0.48 <= lo and hi <= 0.50,
            f"D/I in [{lo:.6f}, {hi:.6f}] over {len(ratios)} entangled points")

    res_ok, bound_ok, sep_ok, total = True, True, True, 0
    for name in ("transport-hot-right", "transport-hot-left", "transport-hot-both"):
        sc = replace(cfg, **SCENARIOS[name], scenario=name, omega_i_min=None,
                     omega_i_max=None)
        for row in run_sweep(sc).rows:
            r = row.report
            if r is None:
                continue
            total += 1
            res_ok &= r.I <= 1 + 1e-9 and r.D <= 1 + 1e-9
            bound_ok &= "bound-violated" not in row.flags
            sep_ok &= r.E_N_exact == 0.0
    rep.add("resonant_bounded", res_ok, f"{total} resonant points")
    rep.add("resonant_bound_inequality", bound_ok, f"{total} resonant points")
    rep.add("resonant_separable", sep_ok, f"{total} resonant points")

    worst = identity_fuzz(1000, seed)
    rep.add("generator_negativity_identity", worst < 1e-10, f"max residual {worst:.3g}")

    env = cfg.environment()
    gc = solve_green_coefficients(env.densities, cfg.driving(), cfg.order)
    pair_ok = all(bc.heat_current_terms(bc.BandSpec(w, cfg.delta_omega, "R"), env, gc)[1] >= 0
                  for w in cfg.grid)
    rep.add("pair_heating_nonnegative", pair_ok)

    tmsv = gt.two_mode_squeezed_vacuum(0.4)
    ok = (abs(gt.log_negativity_exact(tmsv) - 0.8) < 1e-8
          and abs(gt.gaussian_discord_exact(tmsv) - gt.entropy_f(math.cosh(0.8) / 2)) < 1e-8)
    rep.add("toolbox_reference_states", ok)

    if cfg.oracle if oracle is None else oracle:
        from .oracle import run_reference_comparison

        table = run_reference_comparison()
        worst = max(row["rel_dev"] for row in table)
        rep.add("discrete_oracle", worst <= 0.15, f"max deviation {worst:.3g}")
    return rep
