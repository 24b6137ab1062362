import hypothesis
import pytest

from degseq import RandomSource, SymmetricProbMatrix, seq_approx_p

hypothesis.settings.register_profile(
    "default", deadline=None, max_examples=60, derandomize=True
)
hypothesis.settings.load_profile("default")


@pytest.fixture(scope="session")
def approx_p_samples():
    """2e5 Poissonized-sampler draws shared by marginal/covariance/matching tests.

    Three mutually weighted vertices, lam=2.4, constant acceptance 0.54: the
    per-edge marginal is 1 - exp(-2.4 * 0.54 / 3) for every pair.
    """
    d = (2, 2, 2)
    lam = 2.4
    big_lambda = SymmetricProbMatrix.full(3, 0.54)
    return [
        seq_approx_p(d, lam, big_lambda, RandomSource(90210, s)) for s in range(200_000)
    ]
