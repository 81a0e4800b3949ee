# config.py

import logging
import os
from dataclasses import dataclass
from importlib import resources as impresources

from dotenv import dotenv_values

LOGGER = logging.getLogger(__name__)

ENV_PREFIX = "TCLFLEX_"
ENV_OVERRIDABLE_KEYS = ("SIM_BLOCK_SIZE", "SIM_MAX_WORKERS")


@dataclass
class FlexConfig:
    """A class to hold configuration information for simulations and the CLI"""

    block_size: int
    max_workers: int
    safety_epsilon_degrees: float
    default_tolerance_watts: float
    sweep_step_hours: float


def load_config(
    config_file: str = ".tclflex-config", package: str = "tclflex"
) -> FlexConfig:
    # read values from the specified config file
    try:
        importable_config_file = str(impresources.files(package) / config_file)
        config = dotenv_values(importable_config_file)
    except ModuleNotFoundError as e:
        LOGGER.error(f"Failed to load config from {package}/{config_file}: {e}")
        exit(1)

    for key in ENV_OVERRIDABLE_KEYS:
        if (override := os.environ.get(f"{ENV_PREFIX}{key}")) is not None:
            config[key] = override
    LOGGER.debug(f"Imported config with values: {config}")

    if (block_size := config.get("SIM_BLOCK_SIZE")) is None:
        raise RuntimeError("Expected config value for simulation block size not found")

    if (max_workers := config.get("SIM_MAX_WORKERS")) is None:
        raise RuntimeError("Expected config value for simulation workers not found")

    if (safety_epsilon := config.get("SAFETY_EPSILON_DEGREES")) is None:
        raise RuntimeError("Expected config value for safety epsilon not found")

    if (tolerance := config.get("DEFAULT_TOLERANCE_WATTS")) is None:
        raise RuntimeError("Expected config value for default tolerance not found")

    if (sweep_step := config.get("SWEEP_STEP_HOURS")) is None:
        raise RuntimeError("Expected config value for sweep step not found")

    flex_config = FlexConfig(
        block_size=int(block_size),
        max_workers=int(max_workers),
        safety_epsilon_degrees=float(safety_epsilon),
        default_tolerance_watts=float(tolerance),
        sweep_step_hours=float(sweep_step),
    )
    if flex_config.block_size < 1 or flex_config.max_workers < 1:
        raise RuntimeError("Simulation block size and workers must be at least 1")
    return flex_config
