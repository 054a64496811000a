from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pamaps.construct import random_F, random_G

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def dyadics(max_exp=8, lo=0, hi=1):
    """Dyadic rationals in [lo, hi] with denominator at most 2**max_exp."""
    den = 1 << max_exp
    return st.integers(int(lo * den), int(hi * den)).map(lambda n: Fraction(n, den))


def rationals(max_den=50):
    return st.builds(lambda q, p: Fraction(p % (q + 1), q),
                     st.integers(1, max_den), st.integers(0, 10**6))


g_maps = st.builds(random_G, st.integers(0, 10**6), st.integers(1, 4))
f_maps = st.builds(random_F, st.integers(0, 10**6), st.integers(0, 6))


@pytest.fixture
def half():
    return Fraction(1, 2)
