from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def cv_registry_path():
    """Bundled 22-language Common Voice v18 registry."""
    return DATA_DIR / "cv18_registry.csv"


@pytest.fixture
def toy_dir():
    return DATA_DIR / "toy"
