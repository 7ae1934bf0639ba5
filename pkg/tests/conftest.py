from pathlib import Path

import numpy as np
import pytest

from netmaint.model import CustomerNetwork, UnitFleet

REPO_ROOT = Path(__file__).resolve().parents[1]
CASE_STUDY_CONFIG = REPO_ROOT / "configs" / "case_study.yaml"


@pytest.fixture(scope="session")
def case_study_config() -> Path:
    assert CASE_STUDY_CONFIG.exists()
    return CASE_STUDY_CONFIG


def random_network(rng, n=None, t_count=1, margin_lo=0.3, margin_hi=1.5):
    """Random network with strict curvature dominance (invertible system)."""
    if n is None:
        n = int(rng.integers(1, 11))
    w = rng.uniform(0.0, 0.6, (n, n))
    w[rng.uniform(size=(n, n)) < 0.4] = 0.0
    np.fill_diagonal(w, 0.0)
    a = w.sum(axis=1) + rng.uniform(margin_lo, margin_hi, n)
    b = rng.uniform(0.5, 5.0, (n, t_count))
    return CustomerNetwork(a=a, b=b, w=w)


def random_fleet(rng, j_count):
    return UnitFleet(
        mu=rng.uniform(2.5, 8.0, j_count),
        sigma=rng.uniform(0.0, 1.0, j_count),
        cost=rng.uniform(0.0, 3.0, j_count),
        q_max=rng.uniform(0.5, 3.0, j_count),
    )
