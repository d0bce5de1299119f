import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def pytest_addoption(parser):
    parser.addoption("--fixtures-dir", default=None,
                     help="directory with reference DIMACS instances (mug100_*.col)")


@pytest.fixture(scope="session")
def fixtures_dir(request):
    import pathlib
    override = request.config.getoption("--fixtures-dir")
    if override:
        return pathlib.Path(override)
    return pathlib.Path(__file__).parent / "fixtures"
