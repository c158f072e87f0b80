import mpmath
import numpy as np
import pytest


def bessel_series(n: int, z: float) -> float:
    """Power-series J_n(z), summed in 60-digit arithmetic.

    Independent of the package's Miller recurrence; used as the accuracy
    oracle for every frozen Bessel value.
    """
    n = int(n)
    sign = 1.0
    if n < 0:
        n = -n
        if n % 2:
            sign = -1.0
    with mpmath.workdps(60):
        half = mpmath.mpf(z) / 2
        term = half**n / mpmath.factorial(n)
        total = term
        z2 = -(half * half)
        for k in range(1, 400):
            term *= z2 / (k * (n + k))
            total += term
            if abs(term) < mpmath.mpf(10) ** -55 * (1 + abs(total)):
                break
        return sign * float(total)


@pytest.fixture
def bessel_oracle():
    return bessel_series


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
