"""
Trace files: one message per line, UTF-8.

Lines starting with ``#`` and blank lines are skipped. A line may carry a
``send`` or ``recv`` prefix followed by a tab to state the direction
relative to the traced agent; without it the direction is inferred from
the sender.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Union

from core.errors import AcreError

from .codec import parse_messages, serialize_message
from .messages import Message

logger = logging.getLogger(__name__)

SEND = "send"
RECV = "recv"


class TraceSyntaxError(AcreError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}", "TRACE_SYNTAX")
        self.line_no = line_no


@dataclass(frozen=True)
class TraceEntry:
    message: Message
    line_no: int
    direction: Optional[str] = None

    def direction_for(self, agent: str) -> str:
        if self.direction:
            return self.direction
        return SEND if self.message.sender == agent else RECV


def parse_trace(text: str) -> List[TraceEntry]:
    entries = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        direction = None
        head, sep, rest = line.partition("\t")
        if sep and head.strip() in (SEND, RECV):
            direction, stripped = head.strip(), rest.strip()
        try:
            messages = parse_messages(stripped)
        except AcreError as e:
            raise TraceSyntaxError(str(e), line_no) from e
        entries.extend(TraceEntry(m, line_no, direction) for m in messages)
    logger.debug("Parsed trace", extra={"entries": len(entries)})
    return entries


def read_trace(path: Union[str, Path]) -> List[TraceEntry]:
    return parse_trace(Path(path).read_text(encoding="utf-8"))


def format_entry(message: Message, direction: Optional[str] = None) -> str:
    line = serialize_message(message)
    return f"{direction}\t{line}" if direction else line


def dump_trace(entries: Iterable[TraceEntry]) -> str:
    return "".join(format_entry(e.message, e.direction) + "\n" for e in entries)
