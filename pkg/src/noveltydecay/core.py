"""Domain types, invariant checks and seed mixing.

Every type here is immutable: numpy arrays stored on an instance are
copied and flagged read-only at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MASK64 = (1 << 64) - 1

# SplitMix64 constants (Steele, Lea & Flood 2014).
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_MUL_1 = 0xBF58476D1CE4E5B9
_MIX_MUL_2 = 0x94D049BB133111EB


class ModelError(ValueError):
    """Raised when a domain object or argument violates its invariants."""


class InvalidTraceError(ModelError):
    def __init__(self, story_id: str, violations: Sequence[str]):
        self.story_id = story_id
        self.violations = list(violations)
        super().__init__(f"story {story_id!r}: " + "; ".join(self.violations))


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# seeds


def _fmix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX_MUL_1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_MUL_2) & MASK64
    return z ^ (z >> 31)


def mix_seed(master_seed: int, story_index: int) -> int:
    """Derive the 64-bit stream seed of one story from the master seed.

    The master seed is first run through a SplitMix64 step, the story index
    is spread by the golden-ratio increment and xor-ed in, and the result is
    passed through the SplitMix64 finalizer again.  Both finalizer passes
    are bijections on 64-bit words, so distinct indices under one master
    seed never collide.
    """
    s = _fmix64((int(master_seed) + _GOLDEN_GAMMA) & MASK64)
    z = s ^ ((int(story_index) * _GOLDEN_GAMMA) & MASK64)
    return _fmix64(z)


def story_rng(master_seed: int, story_index: int) -> np.random.Generator:
    """Independent PCG64 generator for one story."""
    return np.random.Generator(np.random.PCG64(mix_seed(master_seed, story_index)))


# ---------------------------------------------------------------------------
# traces


def validate_trace(trace) -> list[str]:
    """Return every invariant violation of a trace; an empty list means valid.

    Accepts a :class:`StoryTrace` or a raw sequence of ``(t, n)`` pairs.
    Never raises.
    """
    if isinstance(trace, StoryTrace):
        pairs = list(zip(trace.t.tolist(), trace.n.tolist()))
    else:
        try:
            pairs = [(p[0], p[1]) for p in trace]
        except (TypeError, IndexError):
            return ["samples are not (t, n) pairs"]

    if not pairs:
        return ["empty trace"]

    out = []
    if pairs[0][0] != 0:
        out.append("missing t=0")
    prev_t = prev_n = None
    for t, n in pairs:
        if not float(t).is_integer() or t < 0:
            out.append(f"invalid time {t!r}")
        if not (n > 0) or not np.isfinite(n):
            out.append(f"nonpositive n at t={t}")
        if prev_t is not None:
            if t <= prev_t:
                out.append(f"time not strictly increasing at t={t}")
            elif n < prev_n:
                out.append(f"non-monotone at t={t}")
        prev_t, prev_n = t, n
    return out


def _looks_valid(t: np.ndarray, n: np.ndarray) -> bool:
    # vectorised pre-check; the element-wise walk only runs to report violations
    if t.size == 0 or t.dtype.kind not in "iu" or t[0] != 0:
        return False
    return bool(
        np.all(np.diff(t) > 0) and np.all(n > 0) and np.all(np.isfinite(n)) and np.all(np.diff(n) >= 0)
    )


@dataclass(frozen=True, eq=False)
class StoryTrace:
    """Digg counts of one story, sampled in minutes since front-page entry."""

    story_id: str
    t: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t)
        n = np.asarray(self.n, dtype=float)
        if t.shape != n.shape or t.ndim != 1:
            raise ModelError("t and n must be 1-d arrays of equal length")
        if not _looks_valid(t, n):
            violations = validate_trace(list(zip(t.tolist(), n.tolist())))
            if violations:
                raise InvalidTraceError(self.story_id, violations)
        object.__setattr__(self, "t", _frozen_array(t, np.int64))
        object.__setattr__(self, "n", _frozen_array(n, np.float64))

    @classmethod
    def from_samples(cls, story_id: str, samples: Iterable[tuple[int, float]]) -> "StoryTrace":
        samples = list(samples)
        return cls(story_id, [s[0] for s in samples], [float(s[1]) for s in samples])

    @property
    def samples(self) -> list[tuple[int, float]]:
        return list(zip(self.t.tolist(), self.n.tolist()))

    @property
    def max_t(self) -> int:
        return int(self.t[-1])

    def is_dense(self, horizon: int) -> bool:
        if self.max_t < horizon:
            return False
        return bool(np.array_equal(self.t[: horizon + 1], np.arange(horizon + 1)))

    def __eq__(self, other):
        if not isinstance(other, StoryTrace):
            return NotImplemented
        return (
            self.story_id == other.story_id
            and np.array_equal(self.t, other.t)
            and np.array_equal(self.n, other.n)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Cohort:
    """Stories aligned at front-page entry, dense per minute up to ``horizon``."""

    traces: tuple[StoryTrace, ...]
    horizon: int
    counts: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        traces = tuple(self.traces)
        if not traces:
            raise ModelError("cohort needs at least one trace")
        horizon = int(self.horizon)
        if horizon < 0:
            raise ModelError("horizon must be >= 0")
        for tr in traces:
            if not isinstance(tr, StoryTrace):
                raise ModelError("cohort members must be StoryTrace instances")
            if tr.max_t < horizon:
                raise ModelError(
                    f"story {tr.story_id!r} ends at t={tr.max_t}, before horizon {horizon}"
                )
            if not tr.is_dense(horizon):
                raise ModelError(f"story {tr.story_id!r} is not sampled every minute up to {horizon}")
        object.__setattr__(self, "traces", traces)
        object.__setattr__(self, "horizon", horizon)
        counts = np.stack([tr.n[: horizon + 1] for tr in traces])
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    def __len__(self):
        return len(self.traces)

    @property
    def story_ids(self) -> list[str]:
        return [tr.story_id for tr in self.traces]

    def log_increments(self) -> np.ndarray:
        """``log n_i(t) - log n_i(0)`` as an (n_stories, horizon + 1) array."""
        logs = np.log(self.counts)
        return logs - logs[:, :1]

    def __eq__(self, other):
        if not isinstance(other, Cohort):
            return NotImplemented
        return self.horizon == other.horizon and self.traces == other.traces

    __hash__ = None


# ---------------------------------------------------------------------------
# parameters and curves


@dataclass(frozen=True)
class GrowthParams:
    """Mean and variance of the positive multiplicative shocks."""

    mu: float
    sigma2: float

    def __post_init__(self):
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise ModelError(f"mu must be > 0, got {self.mu!r}")
        if not (np.isfinite(self.sigma2) and self.sigma2 >= 0):
            raise ModelError(f"sigma2 must be >= 0, got {self.sigma2!r}")

    @property
    def ratio(self) -> float:
        return self.mu / self.sigma2 if self.sigma2 > 0 else float("inf")


@dataclass(frozen=True, eq=False)
class NoveltyCurve:
    """Novelty factor ``r_t`` for ``t = 1..len(r)``, with ``r_1 = 1``.

    Curves used to drive a simulation (``estimated=False``) must be
    non-negative and non-increasing. Estimated curves only carry the
    normalisation constraint.
    """

    r: np.ndarray
    estimated: bool = False

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        if r.ndim != 1 or r.size == 0:
            raise ModelError("novelty curve must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(r)):
            raise ModelError("novelty curve contains non-finite values")
        if r[0] != 1.0:
            raise ModelError(f"r_1 must equal 1, got {r[0]!r}")
        if not self.estimated:
            if np.any(r < 0):
                raise ModelError("novelty curve must be non-negative")
            if np.any(np.diff(r) > 0):
                raise ModelError("novelty curve must be non-increasing")
        object.__setattr__(self, "r", _frozen_array(r, np.float64))

    def __len__(self):
        return self.r.size

    def at(self, t: int) -> float:
        if not 1 <= t <= self.r.size:
            raise IndexError(f"t={t} outside 1..{self.r.size}")
        return float(self.r[t - 1])

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, self.r.size + 1)

    @classmethod
    def stretched_exponential(cls, a: float, b: float, horizon: int) -> "NoveltyCurve":
        """``exp(-a t^b)`` rescaled so that ``r_1 = 1``."""
        t = np.arange(1, horizon + 1, dtype=float)
        r = np.exp(-a * (t**b - 1.0))
        r[0] = 1.0
        return cls(r)

    def __eq__(self, other):
        if not isinstance(other, NoveltyCurve):
            return NotImplemented
        return self.estimated == other.estimated and np.array_equal(self.r, other.r)

    __hash__ = None


@dataclass(frozen=True)
class KwwParams:
    """Stretched exponential ``c * exp(-a * t**b)``."""

    c: float
    a: float
    b: float

    def __post_init__(self):
        if not (self.c > 0 and np.isfinite(self.c)):
            raise ModelError(f"c must be > 0, got {self.c!r}")
        if not (self.a > 0 and np.isfinite(self.a)):
            raise ModelError(f"a must be > 0, got {self.a!r}")
        if not (0 < self.b <= 1):
            raise ModelError(f"b must lie in (0, 1], got {self.b!r}")

    def __call__(self, t):
        return self.c * np.exp(-self.a * np.asarray(t, dtype=float) ** self.b)


@dataclass(frozen=True)
class LogNormalFit:
    mu_log: float
    sigma_log: float
    ks_stat: float
    p_value: float
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ModelError("log-normal fit needs n >= 2")
        if not (self.sigma_log > 0):
            raise ModelError("sigma_log must be > 0")
        if not (0 <= self.ks_stat <= 1):
            raise ModelError("ks_stat must lie in [0, 1]")
        if not (0 <= self.p_value <= 1):
            raise ModelError("p_value must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class MeanVarSeries:
    """Cross-story mean and variance of ``log N_t - log N_0`` for ``t = 1..T``."""

    t: np.ndarray
    mean: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.int64)
        mean = np.asarray(self.mean, dtype=float)
        var = np.asarray(self.variance, dtype=float)
        if not (t.shape == mean.shape == var.shape) or t.ndim != 1:
            raise ModelError("t, mean and variance must be 1-d and equally long")
        if len(np.unique(t)) != t.size:
            raise ModelError("one point per t")
        if np.any(var < 0):
            raise ModelError("variance must be >= 0")
        object.__setattr__(self, "t", _frozen_array(t, np.int64))
        object.__setattr__(self, "mean", _frozen_array(mean, np.float64))
        object.__setattr__(self, "variance", _frozen_array(var, np.float64))

    def __len__(self):
        return self.t.size

    @property
    def points(self) -> list[tuple[int, float, float]]:
        return list(zip(self.t.tolist(), self.mean.tolist(), self.variance.tolist()))
