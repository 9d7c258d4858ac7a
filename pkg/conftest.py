# conftest.py
"""
Shared pytest fixtures: src/ on the import path, seeded streams and a
scenario-file writer.
"""

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent / "src"))

from aging_ctrw.simulation.mc_stats import stream  # noqa: E402
from aging_ctrw.utils.logger import app_logger  # noqa: E402

MASTER_SEED = 20240601


@pytest.fixture(autouse=True)
def _quiet_logger():
    app_logger.set_level("WARNING")
    yield
    app_logger.clear()


@pytest.fixture
def seed():
    return MASTER_SEED


@pytest.fixture
def rng():
    return stream(MASTER_SEED, 0)


@pytest.fixture
def rng_factory():
    """rng_factory(k) gives stream k of the master seed"""
    return lambda stream_id: stream(MASTER_SEED, stream_id)


@pytest.fixture
def scenario_file(tmp_path):
    """Writes KEY=VALUE lines to a scenario file and returns its path"""
    def write(lines, name="scenario.env"):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return str(path)
    return write
