# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled backward-induction kernel for the maintenance-scheduling DP.

Mirrors ``_dp_fallback.dp_backward`` exactly (same tie-break, same
floating-point accumulation order); see that module for the contract.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def dp_backward(int[:, ::1] trans, double[:, ::1] reward,
                long long[::1] action_count, long long[::1] order):
    cdef Py_ssize_t n_states = trans.shape[0]
    cdef Py_ssize_t n_actions = trans.shape[1]
    cdef Py_ssize_t t_count = reward.shape[0]

    value_arr = np.zeros(n_states, dtype=np.float64)
    count_arr = np.zeros(n_states, dtype=np.int64)
    next_value_arr = np.zeros(n_states, dtype=np.float64)
    next_count_arr = np.zeros(n_states, dtype=np.int64)
    choice_arr = np.empty((t_count, n_states), dtype=np.int32)

    cdef double[::1] value = value_arr
    cdef long long[::1] count = count_arr
    cdef double[::1] next_value = next_value_arr
    cdef long long[::1] next_count = next_count_arr
    cdef int[:, ::1] choice = choice_arr

    cdef Py_ssize_t t, s, k
    cdef int a, nxt, best_action
    cdef bint last
    cdef double val, best
    cdef long long cnt, best_count
    cdef double neg_inf = -np.inf

    for t in range(t_count - 1, -1, -1):
        last = t == t_count - 1
        for s in range(n_states):
            best = neg_inf
            best_count = 0
            best_action = -1
            for k in range(n_actions):
                a = <int> order[k]
                nxt = trans[s, a]
                if last:
                    val = reward[t, a]
                    cnt = action_count[a]
                elif nxt >= 0:
                    val = reward[t, a] + value[nxt]
                    cnt = action_count[a] + count[nxt]
                else:
                    continue
                if val > best or (val == best and cnt < best_count):
                    best = val
                    best_count = cnt
                    best_action = a
            next_value[s] = best
            next_count[s] = best_count
            choice[t, s] = best_action
        value, next_value = next_value, value
        count, next_count = next_count, count

    # `value` views the buffer holding the t=0 layer after the final swap.
    out_value = np.asarray(value).copy()
    out_count = np.asarray(count).copy()
    return out_value, out_count, choice_arr
