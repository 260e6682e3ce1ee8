import pytest

from symchaos import IntegratorConfig, LorenzParams, integrate


@pytest.fixture(scope="session")
def lorenz28():
    """Reference chaotic run shared by event/symbol/complexity tests."""
    return integrate("lorenz", LorenzParams(r=28.0), (1.0, 1.0, 1.0),
                     IntegratorConfig(dt=0.01, t_total=600.0,
                                      t_transient=100.0))
