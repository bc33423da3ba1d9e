"""Simulate -> estimate -> fit pipeline with truth-vs-estimate checks."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .core import GrowthParams, NoveltyCurve
from .diststats import fit_lognormal
from .estimate import estimate_growth_ratio, estimate_novelty, mean_variance_series
from .relaxation import fit_kww, half_life
from .simulate import ShockFamily, SimConfig, simulate_cohort

# tolerances of the round-trip checks
GROWTH_RATIO_REL_TOL = 0.05
NOVELTY_RMSE_MAX = 0.05
NOVELTY_WINDOW = 180
NOVELTY_TAIL_MAX = 0.05
KWW_B_RANGE = (0.3, 0.5)
KWW_A_REL_TOL = 0.25
LOGNORMAL_MINUTE = 120
LOGNORMAL_P_MIN = 0.05


@dataclass(frozen=True)
class RoundTripSpec:
    stories: int = 2000
    horizon: int = 1440
    mu: float = 0.05
    sigma2: float = 0.0072
    kww_a: float = 0.4
    kww_b: float = 0.4
    n0: float = 100.0
    family: str = "gamma"
    smooth: int = 5

    def config(self, seed: int) -> SimConfig:
        return SimConfig(
            n_stories=self.stories,
            horizon=self.horizon,
            growth=GrowthParams(self.mu, self.sigma2),
            novelty=NoveltyCurve.stretched_exponential(self.kww_a, self.kww_b, self.horizon),
            master_seed=seed,
            n0=self.n0,
            shock_family=ShockFamily(self.family),
        )


@dataclass
class Check:
    name: str
    truth: float | None
    estimate: float
    criterion: str
    passed: bool | None  # None: informational only


@dataclass
class RoundTripResult:
    seed: int
    spec: RoundTripSpec
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def table(self) -> str:
        head = f"{'quantity':<28}{'truth':>12}{'estimate':>12}  {'criterion':<24}result"
        lines = [f"roundtrip seed={self.seed} stories={self.spec.stories} horizon={self.spec.horizon}", head]
        for c in self.checks:
            res = "info" if c.passed is None else ("PASS" if c.passed else "FAIL")
            truth = "-" if c.truth is None else f"{c.truth:.5g}"
            lines.append(f"{c.name:<28}{truth:>12}{c.estimate:>12.5g}  {c.criterion:<24}{res}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "spec": asdict(self.spec),
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }


def run_roundtrip(spec: RoundTripSpec, seed: int, workers: int = 1) -> RoundTripResult:
    config = spec.config(seed)
    cohort = simulate_cohort(config, workers=workers)
    out = RoundTripResult(seed, spec)
    add = out.checks.append

    ratio_true = spec.mu / spec.sigma2
    slope = estimate_growth_ratio(mean_variance_series(cohort)).slope
    add(Check("growth ratio mu/sigma2", ratio_true, slope, "within +-5%",
              abs(slope / ratio_true - 1) <= GROWTH_RATIO_REL_TOL))

    curve = estimate_novelty(cohort, spec.smooth)
    w = min(NOVELTY_WINDOW, spec.horizon)
    truth = config.novelty.r[:w]
    rmse = float(np.sqrt(np.mean((curve.r[:w] - truth) ** 2)))
    add(Check(f"novelty RMSE t<={w}", 0.0, rmse, f"< {NOVELTY_RMSE_MAX}", rmse < NOVELTY_RMSE_MAX))
    add(Check(f"novelty r_{w}", float(truth[-1]), float(curve.r[w - 1]),
              f"< {NOVELTY_TAIL_MAX}", bool(curve.r[w - 1] < NOVELTY_TAIL_MAX)))

    fit = fit_kww(curve)
    lo, hi = KWW_B_RANGE
    add(Check("KWW b", spec.kww_b, fit.params.b, f"in [{lo}, {hi}]", lo <= fit.params.b <= hi))
    add(Check("KWW a", spec.kww_a, fit.params.a, "within +-25%",
              abs(fit.params.a / spec.kww_a - 1) <= KWW_A_REL_TOL))
    add(Check("half-life (min)", half_life(spec.kww_a, spec.kww_b),
              half_life(fit.params.a, fit.params.b), "-", None))

    m = min(LOGNORMAL_MINUTE, spec.horizon)
    if len(cohort) >= 8:
        ln = fit_lognormal(cohort.counts[:, m])
        add(Check(f"KS p of log N_{m}", None, ln.p_value,
                  f">= {LOGNORMAL_P_MIN}", ln.p_value >= LOGNORMAL_P_MIN))
    return out
