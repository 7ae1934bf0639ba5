import numpy as np
import pytest

from netmaint.miqp import MiqpFormatError, MiqpModel, big_m_value, export_miqp
from netmaint.model import CustomerNetwork, Horizon, UnitFleet


def tiny_instance(n=1, t_count=2):
    net = CustomerNetwork(
        a=np.full(n, 2.0), b=np.full((n, t_count), 4.0), w=np.zeros((n, n))
    )
    fleet = UnitFleet(mu=[5.0], sigma=[0.5], cost=[1.0], q_max=[1.0])
    horizon = Horizon(t_count=t_count, alpha=0.1, k_scenarios=1, rng_seed=0)
    return net, fleet, horizon


class TestBigM:
    def test_value_dominates_reachable_states(self):
        # states reach at most T+1 without maintenance; M must exceed both
        # that and every threshold
        assert big_m_value([3, 7], 10) == 18.0
        assert big_m_value([1], 1) == 3.0


class TestExportCounts:
    def test_tiny_instance_variable_counts(self):
        net, fleet, horizon = tiny_instance()
        model = export_miqp(net, fleet, [3], horizon)
        kinds = {}
        for name, kind, lo, hi in model.variables:
            kinds.setdefault(kind, []).append(name)
        assert len(kinds["binary"]) == 2  # x[1,1], x[1,2]
        names = [v[0] for v in model.variables]
        assert names.count("s[1,1]") == 1 and "s[1,3]" in names  # T+1 states
        assert sum(1 for n_ in names if n_.startswith("phi[")) == 2
        assert sum(1 for n_ in names if n_.startswith("y[")) == 2

    def test_tiny_instance_constraint_counts(self):
        net, fleet, horizon = tiny_instance()
        model = export_miqp(net, fleet, [3], horizon)
        by_family = {}
        for name in model.constraint_names():
            by_family.setdefault(name.split("[")[0], []).append(name)
        j, t, n = 1, 2, 1
        assert len(by_family["INIT"]) == j
        for fam in ("C1", "C2", "C3", "C4", "C5"):
            assert len(by_family[fam]) == j * t, fam
        assert len(by_family["C6"]) == t
        assert len(by_family["C7"]) == n * t

    def test_scenario_matrix_expands_c5(self):
        net, fleet, horizon = tiny_instance()
        model = export_miqp(net, fleet, np.array([[3.2, 4.1, 3.7]]), horizon)
        c5 = [n_ for n_ in model.constraint_names() if n_.startswith("C5")]
        assert len(c5) == 1 * 2 * 3
        assert "C5[1,1,2]" in c5

    def test_objective_matches_closed_form(self):
        net, fleet, horizon = tiny_instance()
        model = export_miqp(net, fleet, [3], horizon)
        lin = dict(model.objective_linear)
        # R = 1/a = 0.5, so the linear price coefficient is R*b = 2.0
        assert lin["phi[1,1]"] == pytest.approx(2.0)
        assert lin["x[1,1]"] == -1.0
        quad = {(v1, v2): c for v1, v2, c in model.objective_quadratic}
        assert quad[("phi[1,1]", "phi[1,1]")] == pytest.approx(-0.5)


class TestBigMAlgebra:
    @staticmethod
    def _rows(model, j, t):
        rows = {}
        for name, terms, sense, rhs in model.constraints:
            if name in (f"C1[{j},{t}]", f"C2[{j},{t}]", f"C3[{j},{t}]", f"C4[{j},{t}]"):
                rows[name.split("[")[0]] = (dict(terms), sense, rhs)
        return rows

    @staticmethod
    def _value(terms, assignment):
        return sum(coeff * assignment[var] for var, coeff in terms.items())

    def test_maintenance_on_forces_y_equals_s(self):
        net, fleet, horizon = tiny_instance()
        model = export_miqp(net, fleet, [3], horizon)
        rows = self._rows(model, 1, 1)
        s_val = 2.5
        point = {"x[1,1]": 1.0, "s[1,1]": s_val, "y[1,1]": s_val, "s[1,2]": 1.0}
        # C2 and C3 become s - y <= 0 and y - s <= 0: y = s is the only slackless point
        for fam in ("C2", "C3", "C4"):
            terms, sense, rhs = rows[fam]
            assert self._value(terms, point) <= rhs + 1e-12, fam
        terms, _, rhs = rows["C1"]  # s' - s + y = 1 reproduces the reset
        assert self._value(terms, point) == pytest.approx(rhs)
        # y != s is cut off
        bad = dict(point, **{"y[1,1]": s_val - 0.5})
        violated = any(
            self._value(rows[fam][0], bad) > rows[fam][2] + 1e-12
            for fam in ("C2", "C3")
        )
        assert violated

    def test_maintenance_off_forces_y_zero(self):
        net, fleet, horizon = tiny_instance()
        model = export_miqp(net, fleet, [3], horizon)
        rows = self._rows(model, 1, 1)
        point = {"x[1,1]": 0.0, "s[1,1]": 2.0, "y[1,1]": 0.0, "s[1,2]": 3.0}
        for fam in ("C2", "C3", "C4"):
            terms, sense, rhs = rows[fam]
            assert self._value(terms, point) <= rhs + 1e-12, fam
        terms, _, rhs = rows["C1"]  # s' - s + 0 = 1: plain aging
        assert self._value(terms, point) == pytest.approx(rhs)
        # any positive y is cut off by C4 (y <= M x = 0)
        bad = dict(point, **{"y[1,1]": 0.5})
        terms, _, rhs = rows["C4"]
        assert self._value(terms, bad) > rhs


class TestTextRoundTrip:
    def test_parse_inverts_export(self):
        net, fleet, horizon = tiny_instance(n=2, t_count=3)
        net = CustomerNetwork(
            a=[2.0, 3.0],
            b=np.array([[4.0, 3.5, 4.2], [2.0, 2.5, 2.2]]),
            w=np.array([[0.0, 0.5], [0.25, 0.0]]),
        )
        model = export_miqp(net, fleet, [4], horizon)
        assert MiqpModel.from_text(model.to_text()) == model

    def test_round_trip_preserves_floats_exactly(self):
        net, fleet, horizon = tiny_instance()
        model = export_miqp(net, fleet, [3], horizon)
        parsed = MiqpModel.from_text(model.to_text())
        assert parsed.to_text() == model.to_text()

    @pytest.mark.parametrize(
        "text,message",
        [
            ("VAR x binary 0 1\nEND", "MIQP header"),
            ("MIQP m\nBIGM 5.0\n", "END"),
            ("MIQP m\nVAR x binary 0\nEND", "VAR"),
            ("MIQP m\nBIGM 5.0\nCON c ~ 1.0\nEND", "CON"),
            ("MIQP m\nVAR x binary 0 1\nEND", "BIGM"),
        ],
    )
    def test_malformed_text_rejected(self, text, message):
        with pytest.raises(MiqpFormatError, match=message):
            MiqpModel.from_text(text)
