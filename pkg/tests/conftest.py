import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from explomax import CensoredSample, Params  # noqa: E402
from explomax.simulation import generate_censored_sample  # noqa: E402

BENCH_TRUTH = Params(10.0, 10.0, 0.4, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_point():
    """One uncensored failure per component."""
    return CensoredSample([0.5], [2.0], 2, 5.0)


@pytest.fixture
def bench_sample():
    return generate_censored_sample(BENCH_TRUTH, 100, 0.4, np.random.default_rng(11))


@pytest.fixture
def small_censored():
    return CensoredSample([0.05, 0.12, 0.3], [0.02, 0.2], 8, 0.35)
