from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def errata_text() -> str:
    return (ROOT / "ERRATA.md").read_text(encoding="utf-8")
