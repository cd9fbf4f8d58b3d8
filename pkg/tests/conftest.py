import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

LUNG = HERE / "data" / "lung.csv"


@pytest.fixture
def lung_path():
    return LUNG
