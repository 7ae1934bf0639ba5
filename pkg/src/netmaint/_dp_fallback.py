"""Pure-numpy backward-induction kernel (fallback for the compiled core).

Semantics must match ``_dp_core.dp_backward`` exactly: same action order,
same tie-break (higher profit, then fewer total maintenance actions, then
the first action in ``order``), same floating-point accumulation
``value = reward[t] + value[next]`` from the last period backwards.
"""
from __future__ import annotations

import numpy as np


def dp_backward(trans, reward, action_count, order):
    """Backward induction over the joint deterioration-state graph.

    trans        : (S, A) int32, next-state index or -1 when the action is
                   not allowed before the final period.
    reward       : (T, A) float64, per-period profit contribution of each
                   action (revenue at the remaining capacity minus cost).
    action_count : (A,) int64, maintenance actions per action mask.
    order        : (A,) int64, action evaluation order for tie-breaking.

    Returns (value, count, choice): optimal continuation value and
    maintenance count per state at t=0, and the (T, S) int32 policy.
    """
    n_states, _ = trans.shape
    t_count = reward.shape[0]
    value = np.zeros(n_states)
    count = np.zeros(n_states, dtype=np.int64)
    choice = np.empty((t_count, n_states), dtype=np.int32)
    for t in range(t_count - 1, -1, -1):
        last = t == t_count - 1
        best = np.full(n_states, -np.inf)
        best_count = np.zeros(n_states, dtype=np.int64)
        best_action = np.full(n_states, -1, dtype=np.int32)
        for a in order:
            nxt = trans[:, a]
            if last:
                val = np.full(n_states, reward[t, a])
                cnt = np.full(n_states, action_count[a])
            else:
                safe = np.maximum(nxt, 0)
                val = reward[t, a] + value[safe]
                cnt = action_count[a] + count[safe]
                val[nxt < 0] = -np.inf
            better = (val > best) | ((val == best) & (cnt < best_count))
            best = np.where(better, val, best)
            best_count = np.where(better, cnt, best_count)
            best_action = np.where(better, np.int32(a), best_action)
        value, count, choice[t] = best, best_count, best_action
    return value, count, choice
