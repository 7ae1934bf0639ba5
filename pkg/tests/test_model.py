import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netmaint.model import (
    ConfigError,
    CustomerNetwork,
    Horizon,
    MaintenanceSchedule,
    UnitFleet,
    ValidationError,
    load_config,
    simulate_deterioration,
    validate_schedule,
    write_config,
)


def small_fleet(j_count=1):
    return UnitFleet(
        mu=[5.0] * j_count, sigma=[0.5] * j_count,
        cost=[1.0] * j_count, q_max=[1.0] * j_count,
    )


class TestCustomerNetwork:
    def test_nonzero_diagonal_rejected(self):
        w = np.array([[0.5, 0.0], [0.0, 0.0]])
        with pytest.raises(ValidationError, match="w diagonal must be zero"):
            CustomerNetwork(a=[1.0, 1.0], b=np.ones((2, 1)), w=w)

    def test_dominance_violation_names_customer(self):
        w = np.array([[0.0, 2.0], [0.0, 0.0]])
        with pytest.raises(ValidationError, match="Assumption 1.*customer 1"):
            CustomerNetwork(a=[0.1, 1.0], b=np.ones((2, 1)), w=w)

    def test_negative_weight_rejected(self):
        w = np.array([[0.0, -0.1], [0.0, 0.0]])
        with pytest.raises(ValidationError, match="nonnegative"):
            CustomerNetwork(a=[1.0, 1.0], b=np.ones((2, 1)), w=w)

    def test_immutable(self):
        net = CustomerNetwork(a=[1.0], b=np.ones((1, 3)), w=np.zeros((1, 1)))
        with pytest.raises(ValueError):
            net.a[0] = 2.0


class TestUnitFleet:
    def test_mu_must_exceed_one(self):
        with pytest.raises(ValidationError, match="mu must exceed 1"):
            small_fleet()._replace if False else UnitFleet(
                mu=[0.9], sigma=[0.1], cost=[1.0], q_max=[1.0]
            )

    def test_negative_cost_rejected(self):
        with pytest.raises(ValidationError, match="cost"):
            UnitFleet(mu=[5.0], sigma=[0.1], cost=[-1.0], q_max=[1.0])


class TestHorizon:
    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
    def test_alpha_range(self, alpha):
        with pytest.raises(ValidationError):
            Horizon(t_count=5, alpha=alpha, k_scenarios=10, rng_seed=0)


class TestDeterioration:
    def test_no_maintenance_grows_linearly(self):
        s = simulate_deterioration(np.zeros((1, 5), dtype=int))
        assert s.tolist() == [[1, 2, 3, 4, 5, 6]]

    def test_maintenance_resets_to_one(self):
        x = np.zeros((1, 5), dtype=int)
        x[0, 2] = 1
        s = simulate_deterioration(x)
        assert s.tolist() == [[1, 2, 3, 1, 2, 3]]

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(0, 1), min_size=1, max_size=40))
    def test_recurrence_holds_exactly(self, bits):
        x = np.array([bits])
        s = simulate_deterioration(x)
        for t in range(len(bits)):
            assert s[0, t + 1] == (1 - x[0, t]) * s[0, t] + 1
            assert s[0, t] >= 1

    def test_inconsistent_trace_rejected(self):
        x = np.zeros((1, 3), dtype=int)
        bad_s = np.array([[1, 2, 3, 9]])
        with pytest.raises(ValidationError, match="inconsistent"):
            MaintenanceSchedule(x=x, s=bad_s)


class TestValidateSchedule:
    def test_unmaintained_unit_violates_at_horizon_end(self):
        sched = MaintenanceSchedule.from_actions(np.zeros((1, 5), dtype=int))
        ok, violations = validate_schedule(sched, small_fleet(), [4])
        assert not ok
        assert violations == [(1, 5, 5, 4)]

    def test_single_maintenance_keeps_peak_at_threshold(self):
        x = np.zeros((1, 5), dtype=int)
        x[0, 3] = 1
        sched = MaintenanceSchedule.from_actions(x)
        ok, violations = validate_schedule(sched, small_fleet(), [4])
        assert ok and violations == []

    def test_periodic_maintenance_every_nine_periods(self):
        x = np.zeros((1, 30), dtype=int)
        x[0, [8, 17, 26]] = 1  # periods 9, 18, 27
        sched = MaintenanceSchedule.from_actions(x)
        ok, _ = validate_schedule(sched, small_fleet(), [9])
        assert ok

    def test_dimension_mismatch(self):
        sched = MaintenanceSchedule.from_actions(np.zeros((2, 3), dtype=int))
        with pytest.raises(ValidationError, match="units"):
            validate_schedule(sched, small_fleet(1), [4, 4])


class TestConfigIO:
    def test_case_study_fleet_costs(self, case_study_config):
        _, fleet, horizon = load_config(case_study_config)
        assert fleet.cost.tolist() == [20.48, 21.39, 22.73, 24.78, 24.82]
        assert fleet.mu.tolist() == [12.0, 10.0, 11.2, 9.4, 11.8]
        assert fleet.j_count == 5
        assert horizon.t_count == 30

    def test_case_study_network_shape(self, case_study_config):
        net, _, horizon = load_config(case_study_config)
        assert net.n == 10
        assert net.b.shape == (10, 30)
        assert np.all(np.diag(net.w) == 0.0)
        assert np.all(net.a - net.w.sum(axis=1) > 0)

    def test_round_trip(self, tmp_path, case_study_config):
        net, fleet, horizon = load_config(case_study_config)
        out = tmp_path / "copy.yaml"
        write_config(net, fleet, horizon, out)
        net2, fleet2, horizon2 = load_config(out)
        assert np.array_equal(net.a, net2.a)
        assert np.array_equal(net.b, net2.b)
        assert np.array_equal(net.w, net2.w)
        assert np.array_equal(fleet.mu, fleet2.mu)
        assert np.array_equal(fleet.q_max, fleet2.q_max)
        assert horizon == horizon2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nope.yaml")

    def test_malformed_yaml(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("customers: [unclosed\n")
        with pytest.raises(ConfigError, match="cannot parse"):
            load_config(bad)

    def test_invalid_diagonal_through_config(self, tmp_path):
        cfg = tmp_path / "diag.yaml"
        cfg.write_text(
            "customers:\n"
            "  a: [1.0]\n"
            "  b_constant: [1.0]\n"
            "  w: [[0.5]]\n"
            "units:\n"
            "  mu: [5.0]\n  sigma: [0.5]\n  cost: [1.0]\n  q_max: [1.0]\n"
            "horizon:\n"
            "  t_count: 3\n  alpha: 0.1\n  k_scenarios: 5\n  rng_seed: 1\n"
        )
        with pytest.raises(ValidationError, match="w diagonal must be zero"):
            load_config(cfg)

    def test_constant_b_shorthand(self, tmp_path):
        cfg = tmp_path / "const.yaml"
        cfg.write_text(
            "customers:\n"
            "  a: [2.0]\n"
            "  b_constant: [3.5]\n"
            "  w: [[0.0]]\n"
            "units:\n"
            "  mu: [5.0]\n  sigma: [0.5]\n  cost: [1.0]\n  q_max: [1.0]\n"
            "horizon:\n"
            "  t_count: 4\n  alpha: 0.1\n  k_scenarios: 5\n  rng_seed: 1\n"
        )
        net, _, _ = load_config(cfg)
        assert net.b.shape == (1, 4)
        assert np.all(net.b == 3.5)
