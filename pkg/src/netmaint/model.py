"""Domain types, config ingestion and validation.

The config file is a YAML document, see docs/config_format.md for the full
schema.  All types are immutable after construction and safe to share
between threads.
"""
from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np
import yaml

__all__ = [
    "ConfigError",
    "ValidationError",
    "CustomerNetwork",
    "UnitFleet",
    "Horizon",
    "MaintenanceSchedule",
    "PricingSolution",
    "SolutionReport",
    "load_config",
    "write_config",
    "simulate_deterioration",
    "validate_schedule",
]

_ASSUMPTION_TOL = 1e-12


class ConfigError(ValueError):
    """Raised when a config file is missing, malformed or incomplete."""


class ValidationError(ValueError):
    """Raised when a domain-type invariant is violated."""


def _freeze(obj, **arrays):
    for name, arr in arrays.items():
        arr.setflags(write=False)
        object.__setattr__(obj, name, arr)


@dataclasses.dataclass(frozen=True, eq=False)
class CustomerNetwork:
    """Customers' utility parameters and the externality graph.

    a : (N,) quadratic curvature of each customer's consumption reward.
    b : (N, T) linear reward coefficient, per customer and period.
    w : (N, N) nonnegative externality weights, zero diagonal.
    """

    a: np.ndarray
    b: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        w = np.asarray(self.w, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise ValidationError("a must be a non-empty vector")
        n = a.size
        if b.ndim != 2 or b.shape[0] != n:
            raise ValidationError(f"b must be an {n}xT matrix, got shape {b.shape}")
        if w.shape != (n, n):
            raise ValidationError(f"w must be {n}x{n}, got shape {w.shape}")
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)) or not np.all(np.isfinite(w)):
            raise ValidationError("a, b and w must be finite")
        if np.any(a < 0):
            i = int(np.argmax(a < 0))
            raise ValidationError(f"a must be nonnegative (customer {i + 1})")
        if np.any(w < 0):
            i, l = np.argwhere(w < 0)[0]
            raise ValidationError(f"w must be nonnegative (entry {i + 1},{l + 1})")
        if np.any(np.diag(w) != 0.0):
            raise ValidationError("w diagonal must be zero")
        row = w.sum(axis=1)
        bad = a - row < -_ASSUMPTION_TOL
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ValidationError(
                f"Assumption 1 violated for customer {i + 1}: "
                f"a={a[i]:g} < sum of externality weights {row[i]:g}"
            )
        _freeze(self, a=a, b=b, w=w)

    @property
    def n(self) -> int:
        return self.a.size

    @property
    def t_count(self) -> int:
        return self.b.shape[1]


@dataclasses.dataclass(frozen=True, eq=False)
class UnitFleet:
    """Per-unit degradation-threshold distribution, cost and capacity."""

    mu: np.ndarray
    sigma: np.ndarray
    cost: np.ndarray
    q_max: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        sigma = np.asarray(self.sigma, dtype=float)
        cost = np.asarray(self.cost, dtype=float)
        q_max = np.asarray(self.q_max, dtype=float)
        if mu.ndim != 1 or mu.size == 0:
            raise ValidationError("mu must be a non-empty vector")
        j = mu.size
        for name, arr in (("sigma", sigma), ("cost", cost), ("q_max", q_max)):
            if arr.shape != (j,):
                raise ValidationError(f"{name} must have length {j}, got shape {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} must be finite")
        if np.any(mu <= 1.0):
            i = int(np.argmax(mu <= 1.0))
            raise ValidationError(f"mu must exceed 1 (unit {i + 1})")
        if np.any(sigma < 0):
            raise ValidationError("sigma must be nonnegative")
        if np.any(cost < 0):
            raise ValidationError("cost must be nonnegative")
        if np.any(q_max <= 0):
            i = int(np.argmax(q_max <= 0))
            raise ValidationError(f"q_max must be positive (unit {i + 1})")
        _freeze(self, mu=mu, sigma=sigma, cost=cost, q_max=q_max)

    @property
    def j_count(self) -> int:
        return self.mu.size


@dataclasses.dataclass(frozen=True)
class Horizon:
    """Planning horizon and chance-constraint settings."""

    t_count: int
    alpha: float
    k_scenarios: int
    rng_seed: int

    def __post_init__(self):
        if self.t_count < 1:
            raise ValidationError("t_count must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValidationError("alpha must lie in (0, 1)")
        if self.k_scenarios < 1:
            raise ValidationError("k_scenarios must be at least 1")
        if self.rng_seed < 0:
            raise ValidationError("rng_seed must be nonnegative")


def simulate_deterioration(x: np.ndarray) -> np.ndarray:
    """Deterioration states induced by binary actions ``x`` of shape (J, T).

    Returns the (J, T+1) integer state matrix with initial state 1; a
    maintained unit restarts at state 1 the following period, otherwise the
    state grows by one.
    """
    x = np.asarray(x)
    j_count, t_count = x.shape
    s = np.ones((j_count, t_count + 1), dtype=np.int64)
    for t in range(t_count):
        s[:, t + 1] = (1 - x[:, t]) * s[:, t] + 1
    return s


@dataclasses.dataclass(frozen=True, eq=False)
class MaintenanceSchedule:
    """Binary maintenance actions plus the induced deterioration trace."""

    x: np.ndarray  # (J, T) binary
    s: np.ndarray  # (J, T+1) integer states, s[:, 0] == 1

    @classmethod
    def from_actions(cls, x) -> "MaintenanceSchedule":
        x = np.asarray(x, dtype=np.int64)
        if x.ndim != 2:
            raise ValidationError("x must be a JxT matrix")
        if not np.isin(x, (0, 1)).all():
            raise ValidationError("x must be binary")
        return cls(x=x, s=simulate_deterioration(x))

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.int64)
        s = np.asarray(self.s, dtype=np.int64)
        if not np.array_equal(s, simulate_deterioration(x)):
            raise ValidationError("s is inconsistent with x under the deterioration dynamics")
        _freeze(self, x=x, s=s)

    @property
    def j_count(self) -> int:
        return self.x.shape[0]

    @property
    def t_count(self) -> int:
        return self.x.shape[1]


@dataclasses.dataclass(frozen=True, eq=False)
class PricingSolution:
    """Per-period prices, equilibrium consumptions and revenue."""

    phi: np.ndarray  # (N, T)
    q: np.ndarray  # (N, T)
    revenue_per_period: np.ndarray  # (T,)
    total_revenue: float

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        q = np.asarray(self.q, dtype=float)
        rev = np.asarray(self.revenue_per_period, dtype=float)
        if phi.shape != q.shape or rev.shape != (phi.shape[1],):
            raise ValidationError("inconsistent pricing-solution shapes")
        _freeze(self, phi=phi, q=q, revenue_per_period=rev)


@dataclasses.dataclass(frozen=True)
class SolutionReport:
    """Joint schedule/pricing solution with its profit breakdown."""

    schedule: MaintenanceSchedule
    pricing: PricingSolution
    maintenance_cost: float
    profit: float


def validate_schedule(sched: MaintenanceSchedule, fleet: UnitFleet, thresholds):
    """Check ``s[j, t] <= thresholds[j]`` for t = 1..T.

    The deterioration trace is recomputed from the actions rather than
    trusted.  Returns ``(ok, violations)`` where each violation is a tuple
    ``(unit, period, state, threshold)`` with 1-based indices.
    """
    thresholds = np.asarray(thresholds)
    if sched.j_count != fleet.j_count:
        raise ValidationError(
            f"schedule has {sched.j_count} units, fleet has {fleet.j_count}"
        )
    if thresholds.shape != (fleet.j_count,):
        raise ValidationError(f"thresholds must have length {fleet.j_count}")
    s = simulate_deterioration(sched.x)
    violations = []
    for j in range(sched.j_count):
        for t in range(sched.t_count):
            if s[j, t] > thresholds[j]:
                violations.append((j + 1, t + 1, int(s[j, t]), int(thresholds[j])))
    return not violations, violations


# -- config I/O -------------------------------------------------------------

def _require(mapping, key, where):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ConfigError(f"missing '{key}' in {where} section")
    return mapping[key]


def load_config(path):
    """Load and validate a config file.

    Returns ``(CustomerNetwork, UnitFleet, Horizon)``.  Raises ConfigError
    on parse problems and ValidationError when an invariant fails.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config root of {path} must be a mapping")

    cust = _require(raw, "customers", "top-level")
    units = _require(raw, "units", "top-level")
    hor = _require(raw, "horizon", "top-level")

    horizon = Horizon(
        t_count=int(_require(hor, "t_count", "horizon")),
        alpha=float(_require(hor, "alpha", "horizon")),
        k_scenarios=int(_require(hor, "k_scenarios", "horizon")),
        rng_seed=int(_require(hor, "rng_seed", "horizon")),
    )

    a = np.asarray(_require(cust, "a", "customers"), dtype=float)
    if "b" in cust:
        b = np.asarray(cust["b"], dtype=float)
    elif "b_constant" in cust:
        b = np.repeat(
            np.asarray(cust["b_constant"], dtype=float)[:, None], horizon.t_count, axis=1
        )
    else:
        raise ConfigError("customers section needs either 'b' or 'b_constant'")
    if b.ndim != 2 or b.shape[1] != horizon.t_count:
        raise ConfigError(
            f"b must have t_count={horizon.t_count} columns, got shape {b.shape}"
        )
    w = np.asarray(_require(cust, "w", "customers"), dtype=float)
    net = CustomerNetwork(a=a, b=b, w=w)
    if "n" in cust and int(cust["n"]) != net.n:
        raise ConfigError(f"declared n={cust['n']} does not match len(a)={net.n}")

    fleet = UnitFleet(
        mu=np.asarray(_require(units, "mu", "units"), dtype=float),
        sigma=np.asarray(_require(units, "sigma", "units"), dtype=float),
        cost=np.asarray(_require(units, "cost", "units"), dtype=float),
        q_max=np.asarray(_require(units, "q_max", "units"), dtype=float),
    )
    if "j_count" in units and int(units["j_count"]) != fleet.j_count:
        raise ConfigError(
            f"declared j_count={units['j_count']} does not match len(mu)={fleet.j_count}"
        )
    return net, fleet, horizon


def write_config(net: CustomerNetwork, fleet: UnitFleet, horizon: Horizon, path):
    """Serialize a model to the YAML config format (round-trips exactly)."""
    doc = {
        "customers": {
            "n": net.n,
            "a": net.a.tolist(),
            "b": net.b.tolist(),
            "w": net.w.tolist(),
        },
        "units": {
            "j_count": fleet.j_count,
            "mu": fleet.mu.tolist(),
            "sigma": fleet.sigma.tolist(),
            "cost": fleet.cost.tolist(),
            "q_max": fleet.q_max.tolist(),
        },
        "horizon": {
            "t_count": horizon.t_count,
            "alpha": horizon.alpha,
            "k_scenarios": horizon.k_scenarios,
            "rng_seed": horizon.rng_seed,
        },
    }
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=False))
