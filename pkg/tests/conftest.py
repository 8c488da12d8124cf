import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def bestval_fixture() -> Path:
    return FIXTURES / "appendix_bestval.csv"


@pytest.fixture(scope="session")
def last30_fixture() -> Path:
    return FIXTURES / "appendix_last30_summary.csv"


@pytest.fixture(scope="session")
def sim_default_config() -> Path:
    return FIXTURES / "sim_default.cfg"
