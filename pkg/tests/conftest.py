import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from scipy.stats import unitary_group

import qduality as q

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unitary(seed):
    return unitary_group.rvs(2, random_state=seed)


def random_states(n, seed=0, ranks=(1, 2, 3, 4)):
    rng = np.random.default_rng(seed)
    return [q.random_state(rng, ranks[i % len(ranks)]) for i in range(n)]


def random_unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)
