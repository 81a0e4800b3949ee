# tests/conftest.py

import json
import logging

import pytest
from mockito import unstub

from tclflex.config import FlexConfig
from tclflex.models import ApplianceParams

# Helper functions and shared values for unit tests


@pytest.fixture()
def capture_logs(caplog):
    # caplog default level is INFO; set to DEBUG instead
    caplog.set_level(logging.DEBUG)
    yield caplog


@pytest.fixture
def unstub_fixture():
    """
    A pytest fixture to ensure mocks are unstubbed after each test.
    """
    yield  # allows the test to run
    unstub()


@pytest.fixture
def params_a():
    """Set A: steady state 1000 W with 1400 appliances."""
    return ApplianceParams.from_delta(
        delta=1.0, drive_rate=0.4, drift_rate=1.0, power=1.0
    )


@pytest.fixture
def params_b():
    return ApplianceParams.from_delta(
        delta=1.0, drive_rate=2.0, drift_rate=1.0, power=1.0
    )


@pytest.fixture
def sim_config():
    # small blocks so the block merge is exercised
    return FlexConfig(
        block_size=250,
        max_workers=2,
        safety_epsilon_degrees=1e-9,
        default_tolerance_watts=5.0,
        sweep_step_hours=0.01,
    )


def _scenario_document(
    drive_rate=0.4,
    drift_rate=1.0,
    n=1400,
    duration=0.35,
    amplitude="max",
    scheme="indiv",
    kind="reduce",
    **extra,
):
    document = {
        "classes": {
            "fridge": {
                "temp_min": 2.0,
                "temp_max": 3.0,
                "drive_rate": drive_rate,
                "drift_rate": drift_rate,
                "power": 1.0,
            }
        },
        "fleets": [{"class": "fridge", "n": n, "sampling": "stratified", "seed": 0}],
        "request": {
            "kind": kind,
            "duration_hours": duration,
            "amplitude_watts": amplitude,
        },
        "scheme": scheme,
        "mode": "longest",
        "seed": 0,
    }
    document.update(extra)
    return document


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario document to a temporary JSON file and return its path."""

    def write(document, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return str(path)

    return write


@pytest.fixture
def make_scenario():
    """Scenario document builder; set A with an indiv request by default."""
    return _scenario_document
