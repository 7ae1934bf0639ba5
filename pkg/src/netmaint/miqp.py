"""Textual MIQP export of the supplier's joint pricing/scheduling problem.

The export exists for independent cross-validation with external solvers;
nothing in this package consumes it except the bundled parser, which is
used to round-trip-check the writer.  Grammar: docs/miqp_format.md.

Variables: phi[i,t] (prices), x[j,t] (binary maintenance), s[j,t] for
t = 1..T+1 (deterioration states) and y[j,t] (big-M linearization of
x[j,t]*s[j,t]).  Constraint families:

  INIT[j]        s[j,1] = 1
  C1[j,t]        s[j,t+1] - s[j,t] + y[j,t] = 1
  C2[j,t]        s[j,t] - y[j,t] + M x[j,t] <= M
  C3[j,t]        y[j,t] - s[j,t] + M x[j,t] <= M
  C4[j,t]        y[j,t] - M x[j,t] <= 0        (y >= 0 is a bound)
  C5[j,t]        s[j,t] <= effective_j          (one row per scenario k
                 when a full scenario matrix is supplied: C5[j,t,k])
  C6[t]          -sum_l (sum_i R_il) phi[l,t] + sum_j q_max_j x[j,t]
                    <= sum_j q_max_j - sum_il R_il b_l(t)
  C7[i,t]        sum_l R_il phi[l,t] <= sum_l R_il b_l(t)

Objective (maximize): sum_t phi(t)' R (B(t) - phi(t)) - sum_jt c_j x[j,t].
"""
from __future__ import annotations

import dataclasses

import numpy as np

from .model import CustomerNetwork, Horizon, UnitFleet

__all__ = ["MiqpFormatError", "MiqpModel", "export_miqp", "big_m_value"]


class MiqpFormatError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class MiqpModel:
    """Structured algebraic model with a canonical text form."""

    name: str
    big_m: float
    # (name, kind, lower, upper); bounds use float("inf") when free above.
    variables: tuple
    # objective sense is always "max"
    objective_linear: tuple  # ((var, coeff), ...)
    objective_quadratic: tuple  # ((var1, var2, coeff), ...)
    # (name, ((var, coeff), ...), sense, rhs) with sense in {"<=", ">=", "="}
    constraints: tuple

    def constraint_names(self):
        return [c[0] for c in self.constraints]

    def to_text(self) -> str:
        lines = [f"MIQP {self.name}", f"BIGM {self.big_m!r}"]
        for name, kind, lo, hi in self.variables:
            lines.append(f"VAR {name} {kind} {lo!r} {hi!r}")
        lines.append("MAXIMIZE")
        for var, coeff in self.objective_linear:
            lines.append(f"  LIN {var} {coeff!r}")
        for v1, v2, coeff in self.objective_quadratic:
            lines.append(f"  QUAD {v1} {v2} {coeff!r}")
        for name, terms, sense, rhs in self.constraints:
            lines.append(f"CON {name} {sense} {rhs!r}")
            for var, coeff in terms:
                lines.append(f"  {var} {coeff!r}")
        lines.append("END")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MiqpModel":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("MIQP "):
            raise MiqpFormatError("missing MIQP header")
        if lines[-1].strip() != "END":
            raise MiqpFormatError("missing END terminator")
        name = lines[0][5:].strip()
        big_m = None
        variables = []
        obj_lin = []
        obj_quad = []
        constraints = []
        current = None  # open constraint being filled
        mode = "head"
        for ln in lines[1:-1]:
            stripped = ln.strip()
            parts = stripped.split()
            if parts[0] == "BIGM":
                big_m = float(parts[1])
            elif parts[0] == "VAR":
                if len(parts) != 5:
                    raise MiqpFormatError(f"bad VAR line: {stripped}")
                variables.append((parts[1], parts[2], float(parts[3]), float(parts[4])))
            elif parts[0] == "MAXIMIZE":
                mode = "objective"
            elif parts[0] == "CON":
                if len(parts) != 4 or parts[2] not in ("<=", ">=", "="):
                    raise MiqpFormatError(f"bad CON line: {stripped}")
                current = (parts[1], [], parts[2], float(parts[3]))
                constraints.append(current)
                mode = "constraint"
            elif mode == "objective":
                if parts[0] == "LIN" and len(parts) == 3:
                    obj_lin.append((parts[1], float(parts[2])))
                elif parts[0] == "QUAD" and len(parts) == 4:
                    obj_quad.append((parts[1], parts[2], float(parts[3])))
                else:
                    raise MiqpFormatError(f"bad objective line: {stripped}")
            elif mode == "constraint" and current is not None:
                if len(parts) != 2:
                    raise MiqpFormatError(f"bad constraint term: {stripped}")
                current[1].append((parts[0], float(parts[1])))
            else:
                raise MiqpFormatError(f"unexpected line: {stripped}")
        if big_m is None:
            raise MiqpFormatError("missing BIGM line")
        return cls(
            name=name,
            big_m=big_m,
            variables=tuple(variables),
            objective_linear=tuple(obj_lin),
            objective_quadratic=tuple(obj_quad),
            constraints=tuple(
                (nm, tuple(terms), sense, rhs) for nm, terms, sense, rhs in constraints
            ),
        )


def big_m_value(effective, t_count: int) -> float:
    """Bound dominating every reachable deterioration state."""
    return float(int(np.max(effective)) + t_count + 1)


def export_miqp(
    net: CustomerNetwork,
    fleet: UnitFleet,
    thresholds,
    horizon: Horizon,
    name: str = "netmaint",
) -> MiqpModel:
    """Build the joint pricing/scheduling MIQP.

    ``thresholds`` is either a length-J vector of effective thresholds (one
    C5 row per unit and period) or a (J, K) scenario matrix (one row per
    scenario).
    """
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.ndim == 1:
        scen = thresholds[:, None]
        per_scenario = False
    elif thresholds.ndim == 2:
        scen = thresholds
        per_scenario = True
    else:
        raise MiqpFormatError("thresholds must be a vector or a JxK matrix")
    j_count = fleet.j_count
    if scen.shape[0] != j_count:
        raise MiqpFormatError(f"thresholds must cover {j_count} units")
    t_count = horizon.t_count
    n = net.n
    big_m = big_m_value(scen.min(axis=1), t_count)
    inf = float("inf")
    r = np.linalg.inv(np.diag(net.a) - net.w)

    variables = []
    for i in range(1, n + 1):
        for t in range(1, t_count + 1):
            variables.append((f"phi[{i},{t}]", "continuous", 0.0, inf))
    for j in range(1, j_count + 1):
        for t in range(1, t_count + 1):
            variables.append((f"x[{j},{t}]", "binary", 0.0, 1.0))
    for j in range(1, j_count + 1):
        for t in range(1, t_count + 2):
            variables.append((f"s[{j},{t}]", "continuous", 0.0, inf))
    for j in range(1, j_count + 1):
        for t in range(1, t_count + 1):
            variables.append((f"y[{j},{t}]", "continuous", 0.0, inf))

    obj_lin = []
    obj_quad = []
    for t in range(1, t_count + 1):
        b_t = net.b[:, t - 1]
        rb = r @ b_t
        for i in range(1, n + 1):
            coeff = float(rb[i - 1])
            if coeff != 0.0:
                obj_lin.append((f"phi[{i},{t}]", coeff))
        for i in range(1, n + 1):
            for l in range(1, n + 1):
                coeff = -float(r[i - 1, l - 1])
                if coeff != 0.0:
                    obj_quad.append((f"phi[{i},{t}]", f"phi[{l},{t}]", coeff))
    for j in range(1, j_count + 1):
        cost = float(fleet.cost[j - 1])
        if cost != 0.0:
            for t in range(1, t_count + 1):
                obj_lin.append((f"x[{j},{t}]", -cost))

    cons = []
    for j in range(1, j_count + 1):
        cons.append((f"INIT[{j}]", ((f"s[{j},1]", 1.0),), "=", 1.0))
    for j in range(1, j_count + 1):
        for t in range(1, t_count + 1):
            cons.append((
                f"C1[{j},{t}]",
                ((f"s[{j},{t + 1}]", 1.0), (f"s[{j},{t}]", -1.0), (f"y[{j},{t}]", 1.0)),
                "=",
                1.0,
            ))
            cons.append((
                f"C2[{j},{t}]",
                ((f"s[{j},{t}]", 1.0), (f"y[{j},{t}]", -1.0), (f"x[{j},{t}]", big_m)),
                "<=",
                big_m,
            ))
            cons.append((
                f"C3[{j},{t}]",
                ((f"y[{j},{t}]", 1.0), (f"s[{j},{t}]", -1.0), (f"x[{j},{t}]", big_m)),
                "<=",
                big_m,
            ))
            cons.append((
                f"C4[{j},{t}]",
                ((f"y[{j},{t}]", 1.0), (f"x[{j},{t}]", -big_m)),
                "<=",
                0.0,
            ))
    for j in range(1, j_count + 1):
        for t in range(1, t_count + 1):
            if per_scenario:
                for k in range(1, scen.shape[1] + 1):
                    cons.append((
                        f"C5[{j},{t},{k}]",
                        ((f"s[{j},{t}]", 1.0),),
                        "<=",
                        float(scen[j - 1, k - 1]),
                    ))
            else:
                cons.append((
                    f"C5[{j},{t}]",
                    ((f"s[{j},{t}]", 1.0),),
                    "<=",
                    float(scen[j - 1, 0]),
                ))
    col_sums = r.sum(axis=0)  # sum_i R_il
    total_cap = float(fleet.q_max.sum())
    for t in range(1, t_count + 1):
        b_t = net.b[:, t - 1]
        terms = []
        for l in range(1, n + 1):
            coeff = -float(col_sums[l - 1])
            if coeff != 0.0:
                terms.append((f"phi[{l},{t}]", coeff))
        for j in range(1, j_count + 1):
            terms.append((f"x[{j},{t}]", float(fleet.q_max[j - 1])))
        rhs = total_cap - float(col_sums @ b_t)
        cons.append((f"C6[{t}]", tuple(terms), "<=", rhs))
    for t in range(1, t_count + 1):
        b_t = net.b[:, t - 1]
        for i in range(1, n + 1):
            terms = tuple(
                (f"phi[{l},{t}]", float(r[i - 1, l - 1]))
                for l in range(1, n + 1)
                if r[i - 1, l - 1] != 0.0
            )
            cons.append((f"C7[{i},{t}]", terms, "<=", float(r[i - 1] @ b_t)))

    return MiqpModel(
        name=name,
        big_m=big_m,
        variables=tuple(variables),
        objective_linear=tuple(obj_lin),
        objective_quadratic=tuple(obj_quad),
        constraints=tuple(cons),
    )
