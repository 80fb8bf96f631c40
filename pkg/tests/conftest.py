import pytest
from hypothesis import HealthCheck, settings

from multibern.verify import oracle_table

settings.register_profile(
    "default",
    deadline=None,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def oracle():
    """B_0..B_2000 as Fractions from the binomial recurrence."""
    return oracle_table(2000)


def reduce_mod(q, p):
    return q.numerator % p * pow(q.denominator, -1, p) % p
