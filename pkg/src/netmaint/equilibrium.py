"""Followers' game: customer utilities, best responses and the Nash equilibrium.

The per-period game between customers is linear-quadratic.  When the
diagonal curvature matrix strictly dominates the externality weights, the
best-response map is a contraction and the equilibrium has a closed form,
which the iterative Jacobi solver cross-checks.
"""
from __future__ import annotations

import dataclasses

import numpy as np

from .model import CustomerNetwork

__all__ = [
    "EquilibriumError",
    "UnboundedResponseError",
    "SingularNetworkError",
    "InfeasiblePriceError",
    "ConvergenceError",
    "EquilibriumResult",
    "customer_utility",
    "best_response",
    "nash_closed_form",
    "nash_iterative",
]

COND_LIMIT = 1e12
_Q_FLOOR = -1e-9


class EquilibriumError(RuntimeError):
    pass


class UnboundedResponseError(EquilibriumError):
    """Best response undefined because the curvature a_i is zero."""


class SingularNetworkError(EquilibriumError):
    """A - W is singular or too ill-conditioned to invert reliably."""


class InfeasiblePriceError(EquilibriumError):
    """The closed form would produce a negative consumption."""


class ConvergenceError(EquilibriumError):
    """The Jacobi iteration did not reach the tolerance."""


@dataclasses.dataclass(frozen=True)
class EquilibriumResult:
    q: np.ndarray
    iterations: int
    residual: float


def customer_utility(net: CustomerNetwork, i: int, t: int, q, phi_i: float) -> float:
    """Single-period utility of customer ``i`` at consumption profile ``q``.

    -0.5*a_i*q_i^2 + b_i(t)*q_i + q_i * sum_l w_il*q_l - phi_i*q_i.
    Indices ``i`` and ``t`` are 0-based.
    """
    q = np.asarray(q, dtype=float)
    if not 0 <= i < net.n:
        raise IndexError(f"customer index {i} out of range")
    if not 0 <= t < net.t_count:
        raise IndexError(f"period index {t} out of range")
    qi = q[i]
    return float(
        -0.5 * net.a[i] * qi * qi
        + net.b[i, t] * qi
        + qi * float(net.w[i] @ q)
        - phi_i * qi
    )


def best_response(net: CustomerNetwork, i: int, t: int, q_others, phi_i: float) -> float:
    """Utility-maximizing consumption of customer ``i``, projected onto q >= 0.

    ``q_others`` is a full length-N profile; entry ``i`` is ignored (the
    diagonal of w is zero).
    """
    if not 0 <= i < net.n:
        raise IndexError(f"customer index {i} out of range")
    a_i = net.a[i]
    if a_i == 0.0:
        raise UnboundedResponseError(f"a is zero for customer {i + 1}")
    q_others = np.asarray(q_others, dtype=float)
    spill = float(net.w[i] @ q_others)
    return max(0.0, (net.b[i, t] - phi_i + spill) / a_i)


def _system_matrix(net: CustomerNetwork) -> np.ndarray:
    g = np.diag(net.a) - net.w
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularNetworkError(
            f"A - W is numerically singular (condition number {cond:.3g})"
        )
    return g

def _residual(net, t, phi, q) -> float:
    return max(
        abs(q[i] - best_response(net, i, t, q, phi[i])) for i in range(net.n)
    )


def nash_closed_form(net: CustomerNetwork, t: int, phi) -> EquilibriumResult:
    """Unique interior Nash equilibrium q = (A - W)^-1 (B(t) - phi).

    Valid only when the resulting consumption is nonnegative; otherwise an
    InfeasiblePriceError is raised (the closed form does not hold outside
    the nonnegative orthant).
    """
    phi = np.asarray(phi, dtype=float)
    g = _system_matrix(net)
    q = np.linalg.solve(g, net.b[:, t] - phi)
    if np.any(q < _Q_FLOOR):
        i = int(np.argmin(q))
        raise InfeasiblePriceError(
            f"closed-form consumption is negative for customer {i + 1} (q={q[i]:.3g})"
        )
    q = np.maximum(q, 0.0)
    return EquilibriumResult(q=q, iterations=0, residual=_residual(net, t, phi, q))


def nash_iterative(
    net: CustomerNetwork,
    t: int,
    phi,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    q0=None,
) -> EquilibriumResult:
    """Fixed point of the projected best-response map via Jacobi sweeps.

    All customers update synchronously from the previous iterate, which is
    order-independent and deterministic.  ``q0`` optionally overrides the
    zero starting point.
    """
    phi = np.asarray(phi, dtype=float)
    _system_matrix(net)  # conditioning guard
    if np.any(net.a == 0.0):
        raise UnboundedResponseError("a is zero for some customer")
    q = np.zeros(net.n) if q0 is None else np.array(q0, dtype=float)
    b_t = net.b[:, t]
    for it in range(1, max_iter + 1):
        q_next = np.maximum(0.0, (b_t - phi + net.w @ q) / net.a)
        gap = float(np.max(np.abs(q_next - q)))
        q = q_next
        if gap <= tol:
            return EquilibriumResult(
                q=q, iterations=it, residual=_residual(net, t, phi, q)
            )
    raise ConvergenceError(f"no fixed point after {max_iter} Jacobi sweeps")
