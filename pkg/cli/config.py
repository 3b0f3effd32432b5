"""
Options shared by the acre management commands.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from django.conf import settings
from django.core.management.base import CommandError

from core.errors import AcreError, describe

logger = logging.getLogger(__name__)

HUMAN = "human"
RECORDS = "records"
DOT = "dot"
JSON = "json"
JSON_LINES = "json-lines"

# exit codes
OK = 0
FAILED = 1
USAGE = 2
IO = 3

_IO_CODES = {"FETCH_FAILED", "STORE_CORRUPT", "IO_ERROR"}


@dataclass(frozen=True)
class CliConfig:
    store_root: Path
    sources: Tuple[str, ...] = ()
    output_format: str = HUMAN
    verbosity: int = 1
    # True when --store was passed explicitly
    store_given: bool = False

    @classmethod
    def from_options(cls, options: dict, sources=(), output_format: Optional[str] = None) -> "CliConfig":
        store = options.get("store")
        return cls(
            store_root=Path(store or getattr(settings, "ACRE_STORE", "./acre-store")),
            sources=tuple(sources),
            output_format=output_format or options.get("format") or HUMAN,
            verbosity=int(options.get("verbosity", 1)),
            store_given=bool(store),
        )


def add_store_argument(parser, help_text: str = "Protocol store root (default: ACRE_STORE).") -> None:
    parser.add_argument("--store", default=None, help=help_text)


def exit_code(error: AcreError) -> int:
    return IO if error.error_code in _IO_CODES else FAILED


def command_error(error: AcreError) -> CommandError:
    """CommandError carrying the error's hint and the matching exit code."""
    logger.debug(f"Command failed: {error}", extra={"error_code": error.error_code})
    return CommandError(describe(error), returncode=exit_code(error))


def io_error(path, error: OSError) -> CommandError:
    return CommandError(f"{path}: {error.strerror or error}", returncode=IO)
