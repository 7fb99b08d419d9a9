import pytest

from nifty_sarima.series import resample_monthly_mean
from nifty_sarima.synthetic import synthetic_quotes, write_quotes_csv

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def quotes():
    return synthetic_quotes()


@pytest.fixture(scope="session")
def monthly(quotes):
    """132 monthly means, 2009-01..2019-12."""
    return resample_monthly_mean(quotes)


@pytest.fixture(scope="session")
def quotes_csv(tmp_path_factory, quotes):
    path = tmp_path_factory.mktemp("data") / "nifty_daily.csv"
    write_quotes_csv(quotes, path, nse_dates=True)
    return path


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
