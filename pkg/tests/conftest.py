import numpy as np
import pytest

from gcnsir.ingest import RegionSet
from gcnsir.synthetic import random_regions

# 48 contiguous states plus the rows the default exclusions must drop.
CONTIGUOUS_STATES = [
    "Alabama", "Arizona", "Arkansas", "California", "Colorado", "Connecticut", "Delaware",
    "Florida", "Georgia", "Idaho", "Illinois", "Indiana", "Iowa", "Kansas", "Kentucky",
    "Louisiana", "Maine", "Maryland", "Massachusetts", "Michigan", "Minnesota", "Mississippi",
    "Missouri", "Montana", "Nebraska", "Nevada", "New Hampshire", "New Jersey", "New Mexico",
    "New York", "North Carolina", "North Dakota", "Ohio", "Oklahoma", "Oregon", "Pennsylvania",
    "Rhode Island", "South Carolina", "South Dakota", "Tennessee", "Texas", "Utah", "Vermont",
    "Virginia", "Washington", "West Virginia", "Wisconsin", "Wyoming",
]
EXCLUDED_ROWS = [
    "Alaska", "Hawaii", "District of Columbia", "Puerto Rico", "Guam", "Virgin Islands",
    "American Samoa", "Northern Mariana Islands", "Diamond Princess", "Grand Princess",
]


@pytest.fixture
def two_regions():
    return RegionSet(("A", "B"), np.array([1000.0, 3000.0]), np.array([[0.0, 50.0], [50.0, 0.0]]))


@pytest.fixture
def six_regions():
    return random_regions(6, seed=1)


def single_region(P=1000.0):
    return RegionSet(("only",), np.array([P]), np.zeros((1, 1)))


# One line per acceptance criterion, printed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
