"""Monte-Carlo cohorts under the discounted multiplicative growth model.

Each story evolves as ``n(t) = (1 + r_t X_t) n(t-1)`` with i.i.d. positive
shocks ``X_t``.  A story's shocks come from its own PCG64 stream seeded by
``mix_seed(master_seed, story_index)``, so cohorts do not depend on the
order (or the process) in which stories are generated.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .core import Cohort, GrowthParams, ModelError, NoveltyCurve, StoryTrace, story_rng


class ShockFamily(str, enum.Enum):
    GAMMA = "gamma"
    LOGNORMAL = "lognormal"
    CONSTANT = "constant"


def gamma_shape_scale(growth: GrowthParams) -> tuple[float, float]:
    """Moment-matched gamma parameters: shape mu^2/sigma2, scale sigma2/mu."""
    if growth.sigma2 <= 0:
        raise ModelError("gamma shocks need sigma2 > 0")
    return growth.mu**2 / growth.sigma2, growth.sigma2 / growth.mu


def lognormal_params(growth: GrowthParams) -> tuple[float, float]:
    """(mean, sd) of log X for a log-normal X with the requested moments."""
    if growth.sigma2 <= 0:
        raise ModelError("lognormal shocks need sigma2 > 0")
    s2 = math.log1p(growth.sigma2 / growth.mu**2)
    return math.log(growth.mu) - 0.5 * s2, math.sqrt(s2)


def _check_family(growth: GrowthParams, family) -> ShockFamily:
    family = ShockFamily(family)
    if family is ShockFamily.CONSTANT and growth.sigma2 != 0:
        raise ModelError("constant shocks require sigma2 == 0")
    if family is not ShockFamily.CONSTANT and growth.sigma2 == 0:
        raise ModelError(f"{family.value} shocks require sigma2 > 0; use 'constant'")
    return family


def draw_shocks(
    growth: GrowthParams, family, rng: np.random.Generator, size: int
) -> np.ndarray:
    """``size`` i.i.d. positive shocks with mean ``mu`` and variance ``sigma2``.

    Gamma draws use numpy's Marsaglia-Tsang sampler; log-normal draws
    exponentiate standard normals (ziggurat).
    """
    family = _check_family(growth, family)
    if family is ShockFamily.CONSTANT:
        return np.full(size, growth.mu)
    if family is ShockFamily.GAMMA:
        k, theta = gamma_shape_scale(growth)
        x = rng.gamma(k, theta, size)
    else:
        m, s = lognormal_params(growth)
        x = rng.lognormal(m, s, size)
    # gamma with tiny shape can underflow to exactly 0
    return np.maximum(x, np.finfo(float).tiny)


def draw_shock(growth: GrowthParams, family, rng: np.random.Generator) -> float:
    return float(draw_shocks(growth, family, rng, 1)[0])


@dataclass(frozen=True, eq=False)
class SimConfig:
    n_stories: int
    horizon: int
    growth: GrowthParams
    novelty: NoveltyCurve
    master_seed: int
    n0: Union[float, Sequence[float]] = 100.0
    shock_family: ShockFamily = ShockFamily.GAMMA

    def __post_init__(self):
        if int(self.n_stories) < 1:
            raise ModelError("n_stories must be >= 1")
        if int(self.horizon) < 1:
            raise ModelError("horizon must be >= 1")
        if len(self.novelty) < self.horizon:
            raise ModelError(
                f"novelty curve has {len(self.novelty)} values, horizon is {self.horizon}"
            )
        if self.novelty.estimated:
            raise ModelError("simulation needs an exact (non-estimated) novelty curve")
        if np.ndim(self.n0) == 0:
            n0 = float(self.n0)
            if not n0 > 0:
                raise ModelError("n0 must be > 0")
        else:
            n0 = tuple(float(v) for v in self.n0)
            if len(n0) != self.n_stories:
                raise ModelError("per-story n0 must have one value per story")
            if not all(v > 0 for v in n0):
                raise ModelError("n0 must be > 0")
        object.__setattr__(self, "n0", n0)
        object.__setattr__(self, "shock_family", _check_family(self.growth, self.shock_family))

    def initial_count(self, story_index: int) -> float:
        if isinstance(self.n0, tuple):
            return self.n0[story_index]
        return self.n0

    def canonical(self) -> dict:
        """Flat, ordered description used for digests and provenance."""
        return {
            "n_stories": int(self.n_stories),
            "horizon": int(self.horizon),
            "mu": repr(float(self.growth.mu)),
            "sigma2": repr(float(self.growth.sigma2)),
            "shock_family": self.shock_family.value,
            "master_seed": int(self.master_seed),
            "n0": repr(self.n0),
            "novelty": ",".join(repr(float(v)) for v in self.novelty.r[: self.horizon]),
        }


def story_shocks(config: SimConfig, story_index: int) -> np.ndarray:
    """The shocks ``X_1..X_T`` that :func:`simulate_story` uses for this story."""
    rng = story_rng(config.master_seed, story_index)
    return draw_shocks(config.growth, config.shock_family, rng, config.horizon)


def simulate_story(config: SimConfig, story_index: int) -> StoryTrace:
    x = story_shocks(config, story_index)
    r = config.novelty.r[: config.horizon]
    factors = np.empty(config.horizon + 1)
    factors[0] = config.initial_count(story_index)
    factors[1:] = 1.0 + r * x
    # cumprod multiplies left to right, i.e. exactly the recursion order
    n = np.cumprod(factors)
    return StoryTrace(f"s{story_index:06d}", np.arange(config.horizon + 1), n)


def _simulate_chunk(args) -> list[StoryTrace]:
    config, lo, hi = args
    return [simulate_story(config, i) for i in range(lo, hi)]


def simulate_cohort(config: SimConfig, workers: int = 1) -> Cohort:
    """Simulate ``config.n_stories`` independent stories.

    With ``workers > 1`` stories are generated in a process pool; the result
    is identical to the serial run.
    """
    n = int(config.n_stories)
    if workers <= 1 or n < 2:
        traces = [simulate_story(config, i) for i in range(n)]
    else:
        step = max(1, -(-n // (4 * workers)))
        chunks = [(config, lo, min(n, lo + step)) for lo in range(0, n, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = [tr for part in pool.map(_simulate_chunk, chunks) for tr in part]
    return Cohort(tuple(traces), config.horizon)
