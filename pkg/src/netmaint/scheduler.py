"""Exact maintenance scheduling on top of per-period revenue tables.

Given a maintenance decision per period, revenue depends only on the
remaining production capacity, so the supplier's problem decomposes into a
dynamic program over the joint deterioration state with one revenue lookup
per (period, maintenance subset).  A brute-force enumerator serves as the
oracle and the threshold-triggered baseline as the comparison policy.
"""
from __future__ import annotations

import itertools

import numpy as np

from ._dp import dp_backward
from .model import (
    MaintenanceSchedule,
    PricingSolution,
    SolutionReport,
    UnitFleet,
    validate_schedule,
)
from .pricing import RevenueTable, subset_capacity

__all__ = [
    "SchedulingError",
    "SizeError",
    "InfeasibleInstanceError",
    "optimal_schedule_dp",
    "brute_force_schedule",
    "baseline_schedule",
    "evaluate_schedule",
]

DEFAULT_BUDGET = 10**9


class SchedulingError(RuntimeError):
    pass


class SizeError(SchedulingError):
    """Instance exceeds the configured transition-evaluation budget."""


class InfeasibleInstanceError(SchedulingError):
    """No feasible schedule exists for the given thresholds."""


def _check_inputs(fleet: UnitFleet, effective, revenue_tables) -> np.ndarray:
    effective = np.asarray(effective, dtype=np.int64)
    if effective.shape != (fleet.j_count,):
        raise SchedulingError(
            f"effective thresholds must have length {fleet.j_count}"
        )
    if np.any(effective < 1):
        raise InfeasibleInstanceError("effective thresholds below 1 admit no schedule")
    for table in revenue_tables:
        if not isinstance(table, RevenueTable):
            raise SchedulingError("revenue_tables must hold RevenueTable objects")
    return effective


def _action_rewards(fleet: UnitFleet, revenue_tables) -> np.ndarray:
    """reward[t, mask] = revenue at remaining capacity minus maintenance cost."""
    t_count = len(revenue_tables)
    n_actions = 1 << fleet.j_count
    reward = np.empty((t_count, n_actions))
    caps = [subset_capacity(fleet.q_max, mask) for mask in range(n_actions)]
    costs = [
        sum(float(fleet.cost[j]) for j in range(fleet.j_count) if mask >> j & 1)
        for mask in range(n_actions)
    ]
    for t, table in enumerate(revenue_tables):
        for mask in range(n_actions):
            reward[t, mask] = table.revenue(caps[mask]) - costs[mask]
    return reward


def _action_order(j_count: int) -> np.ndarray:
    """Descending maintenance count, then ascending mask.

    With the fewer-total-actions tie-break this prefers schedules that
    maintain earlier among equal-profit optima.
    """
    masks = np.arange(1 << j_count)
    counts = np.array([int(m).bit_count() for m in masks], dtype=np.int64)
    return np.array(sorted(masks, key=lambda m: (-counts[m], m)), dtype=np.int64)


def _profit_backward(reward: np.ndarray, masks) -> float:
    """Fold the per-period rewards from the last period backwards.

    Matches the DP's accumulation order bit for bit so that DP and brute
    force report identical profits.
    """
    profit = 0.0
    for t in range(len(masks) - 1, -1, -1):
        profit = reward[t, masks[t]] + profit
    return profit


def _report(fleet, revenue_tables, masks, profit) -> SolutionReport:
    t_count = len(masks)
    x = np.zeros((fleet.j_count, t_count), dtype=np.int64)
    for t, mask in enumerate(masks):
        for j in range(fleet.j_count):
            x[j, t] = mask >> j & 1
    schedule = MaintenanceSchedule.from_actions(x)
    phi = np.zeros((0, t_count))
    q = np.zeros((0, t_count))
    rev = np.zeros(t_count)
    cols_phi, cols_q = [], []
    for t, mask in enumerate(masks):
        entry = revenue_tables[t].entry(subset_capacity(fleet.q_max, mask))
        cols_phi.append(entry.phi)
        cols_q.append(entry.q)
        rev[t] = entry.revenue
    phi = np.column_stack(cols_phi)
    q = np.column_stack(cols_q)
    pricing = PricingSolution(
        phi=phi, q=q, revenue_per_period=rev, total_revenue=float(rev.sum())
    )
    cost = float(sum(fleet.cost[j] * x[j].sum() for j in range(fleet.j_count)))
    return SolutionReport(
        schedule=schedule, pricing=pricing, maintenance_cost=cost, profit=float(profit)
    )


def optimal_schedule_dp(
    fleet: UnitFleet,
    effective,
    revenue_tables,
    budget: int = DEFAULT_BUDGET,
) -> SolutionReport:
    """Globally optimal schedule by backward induction over joint states.

    A unit sitting at its effective threshold before the final period must
    be maintained (no other transition keeps the next period feasible).
    Ties are broken toward fewer, then earlier, maintenance actions.
    """
    effective = _check_inputs(fleet, effective, revenue_tables)
    j_count = fleet.j_count
    t_count = len(revenue_tables)
    n_states = int(np.prod(effective, dtype=np.int64))
    n_actions = 1 << j_count
    if n_states * n_actions * t_count > budget:
        raise SizeError(
            f"{n_states} joint states x {n_actions} actions x {t_count} periods "
            f"exceeds the budget of {budget} transition evaluations"
        )

    radices = effective  # ages_j in 1..effective_j stored as age-1 digits
    strides = np.ones(j_count, dtype=np.int64)
    for j in range(1, j_count):
        strides[j] = strides[j - 1] * radices[j - 1]

    ages = np.zeros((n_states, j_count), dtype=np.int64)
    idx = np.arange(n_states)
    for j in range(j_count):
        ages[:, j] = (idx // strides[j]) % radices[j] + 1

    trans = np.empty((n_states, n_actions), dtype=np.int32)
    for mask in range(n_actions):
        maintained = np.array([mask >> j & 1 for j in range(j_count)], dtype=bool)
        nxt_ages = np.where(maintained, 1, ages + 1)
        feasible = np.all(nxt_ages <= radices, axis=1)
        nxt_idx = (nxt_ages - 1) @ strides
        trans[:, mask] = np.where(feasible, nxt_idx, -1).astype(np.int32)

    reward = _action_rewards(fleet, revenue_tables)
    counts = np.array([int(m).bit_count() for m in range(n_actions)], dtype=np.int64)
    order = _action_order(j_count)
    value, _, choice = dp_backward(trans, reward, counts, order)
    if not np.isfinite(value[0]):
        raise InfeasibleInstanceError("no feasible schedule from the initial state")

    masks = []
    state = 0  # all ages 1
    for t in range(t_count):
        mask = int(choice[t, state])
        masks.append(mask)
        if t < t_count - 1:
            state = int(trans[state, mask])
    return _report(fleet, revenue_tables, masks, _profit_backward(reward, masks))


def brute_force_schedule(
    fleet: UnitFleet, effective, revenue_tables, limit: int = 1 << 20
) -> SolutionReport:
    """Exhaustive maximum over all binary schedules (oracle for the DP)."""
    effective = _check_inputs(fleet, effective, revenue_tables)
    j_count = fleet.j_count
    t_count = len(revenue_tables)
    if 2 ** (j_count * t_count) > limit:
        raise SizeError(
            f"2^({j_count}*{t_count}) schedules exceed the limit of {limit}"
        )
    reward = _action_rewards(fleet, revenue_tables)
    best = None
    best_key = None
    for bits in itertools.product((0, 1), repeat=j_count * t_count):
        masks = []
        ages = np.ones(j_count, dtype=np.int64)
        feasible = True
        for t in range(t_count):
            if np.any(ages > effective):
                feasible = False
                break
            mask = 0
            for j in range(j_count):
                if bits[t * j_count + j]:
                    mask |= 1 << j
            masks.append(mask)
            ages = np.where(
                [mask >> j & 1 for j in range(j_count)], 1, ages + 1
            )
        if not feasible:
            continue
        profit = _profit_backward(reward, masks)
        n_maint = sum(int(m).bit_count() for m in masks)
        key = (profit, -n_maint)
        if best_key is None or key > best_key:
            best_key = key
            best = masks
    if best is None:
        raise InfeasibleInstanceError("every schedule violates the thresholds")
    return _report(fleet, revenue_tables, best, best_key[0])


def baseline_schedule(fleet: UnitFleet, effective, revenue_tables) -> SolutionReport:
    """Maintain each unit exactly when its state reaches the effective threshold."""
    effective = _check_inputs(fleet, effective, revenue_tables)
    if np.any(effective < 2):
        raise SchedulingError("baseline policy needs effective thresholds >= 2")
    j_count = fleet.j_count
    t_count = len(revenue_tables)
    x = np.zeros((j_count, t_count), dtype=np.int64)
    ages = np.ones(j_count, dtype=np.int64)
    for t in range(t_count):
        trigger = ages == effective
        x[:, t] = trigger.astype(np.int64)
        ages = np.where(trigger, 1, ages + 1)
    report, violations = evaluate_schedule(x, fleet, revenue_tables, effective)
    assert not violations
    return report


def evaluate_schedule(x, fleet: UnitFleet, revenue_tables, thresholds):
    """Re-derive a schedule's feasibility, pricing and profit from scratch.

    Returns ``(SolutionReport, violations)``; an infeasible schedule is
    reported through the violation list rather than an exception.
    """
    x = np.asarray(x, dtype=np.int64)
    schedule = MaintenanceSchedule.from_actions(x)
    _, violations = validate_schedule(schedule, fleet, thresholds)
    reward = _action_rewards(fleet, revenue_tables)
    masks = []
    for t in range(x.shape[1]):
        mask = 0
        for j in range(fleet.j_count):
            if x[j, t]:
                mask |= 1 << j
        masks.append(mask)
    report = _report(fleet, revenue_tables, masks, _profit_backward(reward, masks))
    return report, violations
