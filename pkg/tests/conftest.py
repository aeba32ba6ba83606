import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_instance(m, n, p, p01, sigma_theta, snr_db, rng):
    """Non-degenerate random instance (signal, measurements)."""
    from blockbayes import MarkovParams, ModelParams
    from blockbayes.harness import draw_instance

    params = ModelParams(MarkovParams(p=p, p01=p01), sigma_theta, 0.0)
    return draw_instance(m, n, params, snr_db, rng)
