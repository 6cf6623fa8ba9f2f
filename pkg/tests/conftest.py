"""
Shared fixtures.
"""

import logging

import numpy as np
import pytest

from src.models.additive import reference_model
from src.models.design import DesignMatrix, DesignScheme
from src.utils.logger import get_logger


@pytest.fixture(autouse=True, scope="session")
def quiet_logger():
    """Keep the CLI from attaching console and file handlers during tests."""
    logger = get_logger()
    handler = logging.NullHandler()
    logger.addHandler(handler)
    yield logger
    logger.removeHandler(handler)


@pytest.fixture
def model():
    return reference_model(20)


@pytest.fixture
def orthogonal_design():
    return DesignMatrix(entries=np.array([[1, 1], [1, -1]]), scheme=DesignScheme.rademacher())


@pytest.fixture
def run_file(tmp_path):
    """Write a small run config and return its path."""

    def write(**pairs):
        path = tmp_path / "run.cfg"
        path.write_text("".join(f"{k} = {v}\n" for k, v in pairs.items()))
        return str(path)

    return write
