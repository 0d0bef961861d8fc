import numpy as np
import pytest

from sparsepath import group_standardize, standardize
from sparsepath.synth import GroupSynthSpec, SynthSpec, generate


def fixture_a_raw():
    """Orthogonal 4x3 design with y equal to the first column."""
    X = np.array([
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ])
    return X, X[:, 0].copy()


@pytest.fixture
def fixture_a():
    X, y = fixture_a_raw()
    return standardize(X, y)


@pytest.fixture
def fixture_a_grouped():
    X, y = fixture_a_raw()
    return group_standardize(X, y, [0, 0, 1])


def random_design(n=60, p=40, seed=0, support=5):
    X, y, _ = generate(SynthSpec(n=n, p=p, true_support_size=support, seed=seed))
    return standardize(X, y)


def random_grouped(n=60, G=10, W=3, seed=0, nonzero=3):
    spec = GroupSynthSpec(n=n, G=G, W=W, nonzero_groups=nonzero, seed=seed)
    X, y, _ = generate(spec)
    return group_standardize(X, y, spec.groups())


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
