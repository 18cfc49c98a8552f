from fractions import Fraction
from math import factorial, prod
from typing import Sequence

import pytest
from click.testing import CliRunner
from loguru import logger


def _multinomial(x: Sequence[int]) -> int:
    return factorial(sum(x)) // prod(factorial(v) for v in x)


def _exact_g(lam, mu, ell) -> Fraction:
    """G(ell) as a rational number, summing every product-form weight."""
    ratios = [Fraction(m) / Fraction(lam) for m in mu]

    def states(bounds):
        if not bounds:
            yield ()
            return
        for v in range(bounds[0] + 1):
            for rest in states(bounds[1:]):
                yield (v,) + rest

    return sum(
        _multinomial(x) * prod(r**v for r, v in zip(ratios, x)) for x in states(list(ell))
    )


@pytest.fixture(scope="session")
def exact_g():
    return _exact_g


@pytest.fixture(scope="session")
def two_server_instance():
    """lambda = 1, mu = (0.6, 0.4), ell = (1, 1) and its hand-derived metrics."""
    return {
        "lam": 1.0,
        "mu": (0.6, 0.4),
        "ell": (1, 1),
        "g": 2.48,
        "loss": 1 / 2.48,
        "occupation": (1.4 / 2.48, 1.6 / 2.48),
        "mean_jobs": (1.4 / 2.48, 1.6 / 2.48),
        "response_time": 3.0 / 1.48,
        "pi_full": 0.48 / 2.48,
    }


@pytest.fixture(scope="session")
def four_server_rates():
    return (0.45, 0.3, 0.2, 0.05)


@pytest.fixture(scope="function")
def cli_runner():
    return CliRunner(mix_stderr=False)


@pytest.fixture(scope="function")
def captured_logs():
    """Messages logged through loguru while the test runs."""
    messages = []
    handler = logger.add(lambda m: messages.append(m.record), level="DEBUG")
    yield messages
    logger.remove(handler)
