import pytest

from mcw import build_lb, parse_mis

MINIMAL_MIS = "mis 3 2\ne 1 0 2 1\n"


@pytest.fixture(scope="session")
def minimal_lb():
    """The smallest admissible reduction instance, built once (graph and
    expression together take a few seconds)."""
    return build_lb(parse_mis(MINIMAL_MIS))
