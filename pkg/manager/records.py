"""
Snapshots of a manager's knowledge and their line-oriented rendering.

Every record is one line of tab-separated fields:

    <cycle> event <kind> <subject> [<key>=<value> ...]
    <cycle> bindings <cid> <?name=value ...>
    protocol <namespace/name/version>
    conversation <cid> <status> <other> <namespace> <name> <version> <state> <length> <bindings>
    annotation <cid> <predicate>
    message <cid> <index> <sent|received> <performative> <content>
    archived <cid> <namespace/name/version> <other>

Absent values are written as ``-``.
"""
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from protocols.identifiers import ProtocolId

from .events import Event, EventKind

ABSENT = "-"


@dataclass(frozen=True)
class HistoryRecord:
    index: int
    direction: str
    performative: str
    content: str


@dataclass(frozen=True)
class ConversationRecord:
    cid: str
    status: str
    other: str
    protocol: ProtocolId
    state: str
    length: int
    bindings: str
    annotations: Tuple[str, ...] = ()
    history: Tuple[HistoryRecord, ...] = ()


@dataclass(frozen=True)
class ArchivedRecord:
    cid: str
    protocol: ProtocolId
    other: str


@dataclass(frozen=True)
class ManagerSnapshot:
    agent: str
    protocols: Tuple[ProtocolId, ...] = ()
    conversations: Tuple[ConversationRecord, ...] = ()
    archived: Tuple[ArchivedRecord, ...] = ()

    def conversation(self, cid: str) -> Optional[ConversationRecord]:
        for record in self.conversations:
            if record.cid == cid:
                return record
        return None


def record_line(*fields) -> str:
    return "\t".join(str(f) if f not in (None, "") else ABSENT for f in fields)


def event_lines(cycle: int, events: Iterable[Event]) -> List[str]:
    """Records for one cycle's events; an advanced event is followed by the conversation's bindings."""
    lines = []
    for e in events:
        pairs = [f"{k}={v}" for k, v in e.payload if k != "bindings"]
        lines.append(record_line(cycle, "event", e.kind.value, e.subject, *pairs))
        if e.kind is EventKind.ADVANCED:
            lines.append(record_line(cycle, "bindings", e.subject, e.get("bindings", "")))
    return lines


def snapshot_lines(snapshot: ManagerSnapshot) -> List[str]:
    lines = [record_line("protocol", pid) for pid in snapshot.protocols]
    for c in snapshot.conversations:
        lines.append(record_line(
            "conversation", c.cid, c.status, c.other,
            c.protocol.namespace, c.protocol.name, c.protocol.version,
            c.state, c.length, c.bindings,
        ))
        lines.extend(record_line("annotation", c.cid, a) for a in c.annotations)
        lines.extend(
            record_line("message", c.cid, h.index, h.direction, h.performative, h.content) for h in c.history
        )
    lines.extend(record_line("archived", a.cid, a.protocol, a.other) for a in snapshot.archived)
    return lines
