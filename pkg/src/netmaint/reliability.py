"""Scenario treatment of the degradation-threshold chance constraint.

Thresholds are sampled from per-unit Normal distributions, truncated below
at 1 + 1e-6 by rejection, and reduced to integer "effective" thresholds
floor(min over scenarios).  A schedule whose deterioration states stay at
or below the effective thresholds satisfies every sampled scenario.

The random stream is fully specified so other implementations can match it
bit for bit:

* generator: SplitMix64 (Steele et al. 2014) over 64-bit state;
* uniforms: ``((u64 >> 11) + 0.5) * 2**-53`` in the open interval (0, 1);
* normals: inverse CDF, ``mu + sigma * ndtri(u)`` (Wichura's AS241);
* unit j (0-based) samples from a stream seeded with
  ``seed + (j + 1) * GOLDEN`` mod 2**64, so enlarging the scenario count
  extends each unit's stream without disturbing the others;
* Monte Carlo trial m uses a stream seeded with ``seed + m`` and draws the
  J thresholds in unit order.
"""
from __future__ import annotations

import csv
import dataclasses
import math

import numpy as np
from scipy.special import ndtri

from .model import MaintenanceSchedule, UnitFleet, simulate_deterioration

__all__ = [
    "SamplingError",
    "SplitMix64",
    "ScenarioSet",
    "sample_scenarios",
    "scenario_count_hint",
    "empirical_violation_rate",
]

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
TRUNCATION_FLOOR = 1.0 + 1e-6
_MIN_ACCEPTANCE = 1e-6


class SamplingError(RuntimeError):
    pass


class SplitMix64:
    """Seedable, portable 64-bit generator (SplitMix64)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform draw in the open interval (0, 1)."""
        return ((self.next_u64() >> 11) + 0.5) * 2.0**-53

    def normal(self, mu: float, sigma: float) -> float:
        """Normal draw via the inverse-CDF method."""
        return mu + sigma * float(ndtri(self.uniform()))


def _acceptance_probability(mu: float, sigma: float) -> float:
    if sigma == 0.0:
        return 1.0 if mu > TRUNCATION_FLOOR else 0.0
    z = (TRUNCATION_FLOOR - mu) / sigma
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _truncated_normal(gen: SplitMix64, mu: float, sigma: float) -> float:
    if sigma == 0.0:
        return mu
    while True:
        draw = gen.normal(mu, sigma)
        if draw > TRUNCATION_FLOOR:
            return draw


def _check_acceptance(fleet: UnitFleet):
    for j in range(fleet.j_count):
        p = _acceptance_probability(float(fleet.mu[j]), float(fleet.sigma[j]))
        if p < _MIN_ACCEPTANCE:
            raise SamplingError(
                f"unit {j + 1}: threshold distribution lies almost entirely "
                f"below {TRUNCATION_FLOOR} (acceptance probability {p:.3g})"
            )


@dataclasses.dataclass(frozen=True, eq=False)
class ScenarioSet:
    """Sampled threshold realizations and the induced effective thresholds."""

    samples: np.ndarray  # (J, K), all > 1
    seed: int
    effective: np.ndarray  # (J,) integers, floor(min over scenarios)

    @property
    def j_count(self) -> int:
        return self.samples.shape[0]

    @property
    def k(self) -> int:
        return self.samples.shape[1]

    def dump_csv(self, path):
        """unit,k,sample rows followed by one effective-threshold footer row."""
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["unit", "k", "sample"])
            for j in range(self.j_count):
                for k in range(self.k):
                    out.writerow([j + 1, k + 1, repr(float(self.samples[j, k]))])
            out.writerow(["effective", "", " ".join(str(int(e)) for e in self.effective)])


def sample_scenarios(fleet: UnitFleet, k: int, seed: int) -> ScenarioSet:
    """Draw ``k`` threshold realizations per unit, deterministically in ``seed``."""
    if k < 1:
        raise SamplingError("scenario count must be at least 1")
    _check_acceptance(fleet)
    samples = np.empty((fleet.j_count, k))
    for j in range(fleet.j_count):
        gen = SplitMix64(seed + (j + 1) * GOLDEN)
        mu, sigma = float(fleet.mu[j]), float(fleet.sigma[j])
        for idx in range(k):
            samples[j, idx] = _truncated_normal(gen, mu, sigma)
    effective = np.floor(samples.min(axis=1)).astype(np.int64)
    samples.setflags(write=False)
    effective.setflags(write=False)
    return ScenarioSet(samples=samples, seed=seed, effective=effective)


def scenario_count_hint(alpha: float, beta: float, decision_dims: int) -> int:
    """Classic scenario-approach sample bound ceil((2/a)(ln(1/b) + d)).

    Advisory only: the scenario count configured in the horizon governs.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    if decision_dims < 0:
        raise ValueError("decision_dims must be nonnegative")
    return max(1, math.ceil((2.0 / alpha) * (math.log(1.0 / beta) + decision_dims)))


def empirical_violation_rate(
    schedule: MaintenanceSchedule, fleet: UnitFleet, m_trials: int, seed: int
) -> float:
    """Fraction of fresh threshold draws under which the schedule fails.

    A trial fails when some unit's peak deterioration state over the
    horizon exceeds that trial's sampled threshold.
    """
    if m_trials < 1:
        raise SamplingError("m_trials must be at least 1")
    if schedule.j_count != fleet.j_count:
        raise SamplingError("schedule and fleet unit counts differ")
    _check_acceptance(fleet)
    s = simulate_deterioration(schedule.x)
    peak = s[:, : schedule.t_count].max(axis=1)  # states at periods 1..T
    mu = fleet.mu.astype(float)
    sigma = fleet.sigma.astype(float)
    failures = 0
    for m in range(m_trials):
        gen = SplitMix64(seed + m)
        for j in range(fleet.j_count):
            if _truncated_normal(gen, mu[j], sigma[j]) < peak[j]:
                failures += 1
                break
    return failures / m_trials
