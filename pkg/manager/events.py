"""
Events raised by a conversation manager.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from acl.messages import Message


class EventKind(str, Enum):
    STARTED = "started"
    ADVANCED = "advanced"
    COMPLETED = "completed"
    FAILED = "failed"
    UNMATCHED = "unmatched"
    AMBIGUOUS = "ambiguous"
    CANCEL_REQUEST = "cancelRequest"
    CANCEL_CONFIRMED = "cancelConfirmed"
    CANCEL_FAILED = "cancelFailed"
    TIMEOUT = "timeout"
    GROUP_EVENT = "groupEvent"
    PROTOCOL_ADDED = "protocolAdded"
    WARNING = "warning"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Event:
    """
    ``subject`` is a conversation id, a group id, a protocol id in slash
    form, or the serialized message for unmatched and ambiguous events.
    """
    kind: EventKind
    subject: str
    payload: Tuple[Tuple[str, str], ...] = ()
    message: Optional[Message] = field(default=None, compare=False)

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        for k, v in self.payload:
            if k == key:
                return v
        return default

    def __str__(self) -> str:
        extra = " ".join(f"{k}={v}" for k, v in self.payload)
        return f"{self.kind}({self.subject}{', ' + extra if extra else ''})"


def event(kind: EventKind, subject, message: Optional[Message] = None, **payload) -> Event:
    """Build an event; payload keys use underscores in Python and hyphens in records."""
    pairs = tuple((k.replace("_", "-"), str(v)) for k, v in payload.items() if v is not None)
    return Event(kind, str(subject), pairs, message)
