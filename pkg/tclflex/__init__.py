"""
tclflex: demand-response flexibility of thermostatically controlled load fleets.

Closed-form quotes, single-message broadcast planning and an exact event-driven
fleet simulator, behind a command-line interface.
"""

import importlib.metadata

try:
    __version__ = importlib.metadata.version("tclflex-cli")
except importlib.metadata.PackageNotFoundError:
    __version__ = "unknown"

__author__ = "tclflex developers"
