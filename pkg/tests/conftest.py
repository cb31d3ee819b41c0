import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from holonomy import groups, sampling

settings.register_profile(
    "default", max_examples=60, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

FINITE = [groups.cyclic(6), groups.symmetric(3), groups.symmetric(4), groups.dihedral(4),
          groups.quaternion8()]
ALL_KINDS = FINITE + [groups.U1(), groups.SU2()]

seeds = st.integers(min_value=0, max_value=2**32 - 1)
kinds = st.sampled_from(ALL_KINDS)
finite_kinds = st.sampled_from(FINITE)


def rng_of(seed):
    return np.random.default_rng(seed)


def field_of(seed, G, n_max=8):
    rng = rng_of(seed)
    g = sampling.random_graph(rng, 1, n_max)
    return rng, sampling.random_field(rng, g, G)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
