"""Leader's per-period pricing subproblem.

The supplier maximizes phi' R (B - phi) over nonnegative prices, subject to
nonnegative predicted consumption and the period's production capacity,
where R is the inverse of the equilibrium system matrix.  Eliminating phi
via q = R (B - phi) turns this into a strictly concave QP in consumption
space with simple polyhedral constraints, solved exactly by a primal
active-set method:

    max  B'q - q'Mq          M = sym(A - W), must be positive definite
    s.t. q >= 0              (consumption orthant)
         1'q <= capacity     (production capacity, omitted when infinite)
         (A - W) q <= B      (prices stay nonnegative)

The KKT certificate of the returned point is re-derived by an independent
checker (`check_kkt`) that never looks at solver internals.
"""
from __future__ import annotations

import dataclasses
import math

import numpy as np

from .equilibrium import COND_LIMIT, SingularNetworkError, nash_closed_form
from .model import CustomerNetwork

__all__ = [
    "ModelInvalidError",
    "PricingError",
    "PricingResult",
    "RevenueTable",
    "TableEntry",
    "solve_pricing_qp",
    "solve_pricing_qp_no_network",
    "realized_profit_of_prices",
    "build_revenue_table",
    "subset_capacity",
    "check_kkt",
    "grid_search_revenue",
]


class PricingError(RuntimeError):
    pass


class ModelInvalidError(PricingError):
    """The quadratic form is not positive definite / well conditioned."""


@dataclasses.dataclass(frozen=True)
class PricingResult:
    """Solution of one per-period pricing QP.

    Duals follow the minimization convention (all nonnegative): ``mu_q``
    for q >= 0, ``lam_cap`` for the capacity row, ``mu_phi`` for the
    price-nonnegativity rows.
    """

    phi: np.ndarray
    q: np.ndarray
    revenue: float
    mu_q: np.ndarray
    lam_cap: float
    mu_phi: np.ndarray


@dataclasses.dataclass(frozen=True)
class TableEntry:
    phi: np.ndarray
    q: np.ndarray
    revenue: float


@dataclasses.dataclass(frozen=True)
class RevenueTable:
    """Optimal pricing memoized at every distinct subset-capacity value."""

    entries: dict
    network_known: bool

    def revenue(self, capacity: float) -> float:
        return self.entries[capacity].revenue

    def entry(self, capacity: float) -> TableEntry:
        return self.entries[capacity]


def _problem_matrices(net: CustomerNetwork, network_known: bool):
    g = np.diag(net.a) - (net.w if network_known else 0.0 * net.w)
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularNetworkError(
            f"A - W is numerically singular (condition number {cond:.3g})"
        )
    m = 0.5 * (g + g.T)
    eigmin = float(np.linalg.eigvalsh(m).min())
    if eigmin <= 0.0:
        raise ModelInvalidError(
            f"symmetrized system matrix is not positive definite (min eig {eigmin:.3g})"
        )
    return g, m


def _active_set_qp(h, c, a_ub, b_ub, max_iter=500):
    """Minimize 0.5 x'Hx + c'x subject to A_ub x <= b_ub, H positive definite.

    Starts from x = 0, which must be feasible.  Returns (x, duals) where
    duals aligns with the rows of A_ub.
    """
    n = h.shape[0]
    m = a_ub.shape[0]
    x = np.zeros(n)
    if np.any(b_ub < -1e-9):
        raise PricingError("origin is infeasible for the pricing QP")
    work: list[int] = []
    for _ in range(max_iter):
        rows = a_ub[work]
        k = len(work)
        kkt = np.zeros((n + k, n + k))
        kkt[:n, :n] = h
        kkt[:n, n:] = rows.T
        kkt[n:, :n] = rows
        rhs = np.concatenate([-c, b_ub[work]])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        x_star, lam = sol[:n], sol[n:]
        step = x_star - x
        if np.max(np.abs(step), initial=0.0) <= 1e-12:
            if k == 0 or np.min(lam) >= -1e-10:
                duals = np.zeros(m)
                duals[work] = np.maximum(lam, 0.0)
                return x, duals
            work.pop(int(np.argmin(lam)))
            continue
        # Longest feasible step toward the working-set minimizer.
        alpha = 1.0
        blocker = -1
        for i in range(m):
            if i in work:
                continue
            denom = float(a_ub[i] @ step)
            if denom > 1e-14:
                ratio = float(b_ub[i] - a_ub[i] @ x) / denom
                if ratio < alpha:
                    alpha = max(ratio, 0.0)
                    blocker = i
        x = x + alpha * step
        if blocker >= 0:
            work.append(blocker)
    raise PricingError("active-set iteration limit exceeded")


def _solve(net: CustomerNetwork, t: int, capacity: float, network_known: bool) -> PricingResult:
    if capacity < 0:
        raise PricingError("capacity must be nonnegative")
    g, m_sym = _problem_matrices(net, network_known)
    n = net.n
    b_t = net.b[:, t]
    if np.any(b_t < 0):
        raise ModelInvalidError(
            "pricing requires nonnegative b (zero consumption must admit a "
            "nonnegative price)"
        )
    # min q'Mq - B'q  ==  max B'q - q'Mq
    h = 2.0 * m_sym
    c = -b_t
    has_cap = math.isfinite(capacity)
    rows = [-np.eye(n)]
    rhs = [np.zeros(n)]
    if has_cap:
        rows.append(np.ones((1, n)))
        rhs.append(np.array([capacity]))
    rows.append(g)
    rhs.append(b_t)
    a_ub = np.vstack(rows)
    b_ub = np.concatenate(rhs)
    q, duals = _active_set_qp(h, c, a_ub, b_ub)
    q = np.maximum(q, 0.0)
    mu_q = duals[:n]
    if has_cap:
        lam_cap = float(duals[n])
        mu_phi = duals[n + 1:]
    else:
        lam_cap = 0.0
        mu_phi = duals[n:]
    phi = b_t - g @ q
    phi = np.maximum(phi, 0.0)
    revenue = float(phi @ q)
    return PricingResult(
        phi=phi, q=q, revenue=revenue, mu_q=mu_q, lam_cap=lam_cap, mu_phi=mu_phi
    )


def solve_pricing_qp(net: CustomerNetwork, t: int, capacity: float) -> PricingResult:
    """Optimal prices for period ``t`` given the true network structure.

    ``capacity`` may be ``math.inf`` to drop the capacity constraint.
    """
    return _solve(net, t, capacity, network_known=True)


def solve_pricing_qp_no_network(net: CustomerNetwork, t: int, capacity: float) -> PricingResult:
    """Pricing by a supplier that models the customers as disconnected.

    Identical to `solve_pricing_qp` with the externality weights replaced
    by zero in the supplier's model only; the returned ``q`` and
    ``revenue`` are therefore predictions, not realizations.
    """
    return _solve(net, t, capacity, network_known=False)


def realized_profit_of_prices(net: CustomerNetwork, phi, capacities):
    """Evaluate a full price matrix at the true equilibrium.

    ``phi`` is (N, T), ``capacities`` the per-period available production.
    Returns ``(q_realized, revenue, violations)``; each violation is
    ``(period, excess)`` with a 1-based period, recorded whenever realized
    total consumption exceeds the period's capacity.
    """
    phi = np.asarray(phi, dtype=float)
    capacities = np.asarray(capacities, dtype=float)
    if np.any(phi < 0):
        raise PricingError("phi must be nonnegative")
    t_count = phi.shape[1]
    q_realized = np.zeros_like(phi)
    violations = []
    revenue = 0.0
    for t in range(t_count):
        res = nash_closed_form(net, t, phi[:, t])
        q_realized[:, t] = res.q
        revenue += float(phi[:, t] @ res.q)
        excess = float(res.q.sum() - capacities[t])
        if excess > 1e-9:
            violations.append((t + 1, excess))
    return q_realized, revenue, violations


def subset_capacity(q_max: np.ndarray, maintained_mask: int) -> float:
    """Available production when the units in ``maintained_mask`` are down.

    Accumulates in ascending unit order so that equal subsets always yield
    bit-identical floats (the revenue tables key on this value).
    """
    cap = 0.0
    for j in range(q_max.size):
        if not maintained_mask >> j & 1:
            cap += float(q_max[j])
    return cap


def build_revenue_table(
    net: CustomerNetwork, fleet, t: int, network_known: bool = True
) -> RevenueTable:
    """Memoize the pricing QP at every distinct maintenance-subset capacity."""
    solver = solve_pricing_qp if network_known else solve_pricing_qp_no_network
    entries: dict[float, TableEntry] = {}
    for mask in range(1 << fleet.j_count):
        cap = subset_capacity(fleet.q_max, mask)
        if cap in entries:
            continue
        res = solver(net, t, cap)
        entries[cap] = TableEntry(phi=res.phi, q=res.q, revenue=res.revenue)
    return RevenueTable(entries=entries, network_known=network_known)


def check_kkt(net: CustomerNetwork, t: int, capacity: float, result: PricingResult,
              network_known: bool = True) -> dict:
    """Independent KKT certificate for a pricing solution.

    Rebuilds the consumption-space QP from the raw model data and returns
    the four residuals (each should be <= 1e-8 at an optimum):
    stationarity, primal feasibility, dual feasibility, complementarity.
    """
    g = np.diag(net.a) - (net.w if network_known else 0.0 * net.w)
    m_sym = 0.5 * (g + g.T)
    b_t = net.b[:, t]
    q = result.q
    grad = 2.0 * m_sym @ q - b_t  # gradient of the minimization objective
    stationarity = grad - result.mu_q + result.lam_cap + g.T @ result.mu_phi
    primal = [np.max(-q, initial=0.0), np.max(g @ q - b_t, initial=0.0)]
    comp = [np.max(np.abs(result.mu_q * q), initial=0.0),
            np.max(np.abs(result.mu_phi * (b_t - g @ q)), initial=0.0)]
    dual = min(np.min(result.mu_q, initial=0.0),
               np.min(result.mu_phi, initial=0.0), result.lam_cap)
    if math.isfinite(capacity):
        primal.append(float(q.sum() - capacity))
        comp.append(abs(result.lam_cap * (capacity - float(q.sum()))))
    elif result.lam_cap != 0.0:
        raise PricingError("capacity dual must vanish when capacity is infinite")
    return {
        "stationarity": float(np.max(np.abs(stationarity))),
        "primal": float(max(max(primal), 0.0)),
        "dual": float(max(-dual, 0.0)),
        "complementarity": float(max(comp)),
    }


def grid_search_revenue(net: CustomerNetwork, t: int, capacity: float,
                        points: int = 200) -> float:
    """Brute-force revenue oracle over a uniform price grid (N <= 3 only).

    Scans [0, max b]^N, keeps grid points whose induced consumption is
    feasible, and returns the best revenue found.
    """
    n = net.n
    if n > 3:
        raise PricingError("grid oracle supports at most 3 customers")
    g = np.diag(net.a) - net.w
    b_t = net.b[:, t]
    hi = float(b_t.max())
    axis = np.linspace(0.0, hi, points)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    phi_all = np.stack([grid.ravel() for grid in grids], axis=1)
    best = -np.inf
    chunk = 1 << 20
    for start in range(0, phi_all.shape[0], chunk):
        phi = phi_all[start:start + chunk]
        q = np.linalg.solve(g, (b_t[:, None] - phi.T)).T
        feasible = np.all(q >= -1e-9, axis=1)
        if math.isfinite(capacity):
            feasible &= q.sum(axis=1) <= capacity + 1e-9
        if not feasible.any():
            continue
        revenue = np.einsum("ij,ij->i", phi, np.maximum(q, 0.0))
        best = max(best, float(revenue[feasible].max()))
    return best
