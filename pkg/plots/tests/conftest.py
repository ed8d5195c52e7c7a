from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden.csv"


@pytest.fixture
def golden_csv():
    return str(GOLDEN)
