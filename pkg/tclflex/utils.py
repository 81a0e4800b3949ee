# utils.py

import csv
import io
import logging
from enum import Enum
from functools import wraps
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

import click

from tclflex.constants import (
    EXIT_INVALID_INPUT,
    EXIT_IO_ERROR,
    EXIT_VERIFICATION_MISMATCH,
)
from tclflex.errors import FlexibilityError, VerificationMismatchError
from tclflex.log import add_blankline_before, format_number

LOGGER = logging.getLogger(__name__)


def handle_flex_exceptions(func: Any) -> Any:
    """Turn domain errors into log lines and the documented exit codes."""

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except VerificationMismatchError as e:
            LOGGER.error(add_blankline_before(f"Verification failed:\n{e}"))
            exit(EXIT_VERIFICATION_MISMATCH)
        except (FlexibilityError, ValueError) as e:
            LOGGER.error(add_blankline_before(str(e)))
            exit(EXIT_INVALID_INPUT)
        except OSError as e:
            LOGGER.error(add_blankline_before(f"File error: {e}"))
            exit(EXIT_IO_ERROR)
        except Exception as e:
            LOGGER.error(add_blankline_before(f"Unexpected error: {e}"))
            exit(EXIT_INVALID_INPUT)

    return wrapper


def _format_value(value: Any, format_float: Callable[[float], str]) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def format_record_value(value: Any) -> str:
    """key=value rendering: 6 significant digits, empty for missing values."""
    return _format_value(value, format_number)


def format_csv_value(value: Any) -> str:
    """CSV rendering: full double precision, empty for missing values."""
    return _format_value(value, repr)


def emit_record(record: Mapping[str, Any]) -> None:
    """Write one key=value line per field to stdout."""
    for key, value in record.items():
        click.echo(f"{key}={format_record_value(value)}")


def write_csv_rows(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    out_path: Optional[str] = None,
) -> None:
    """Write CSV to out_path, or to stdout when no path is given."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_csv_value(value) for value in row])

    if out_path is None:
        click.echo(buffer.getvalue(), nl=False)
        return
    with open(out_path, "w", newline="") as out_file:
        out_file.write(buffer.getvalue())
    LOGGER.info(f"Wrote {out_path}")
