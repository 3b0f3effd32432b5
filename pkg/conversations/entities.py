"""
Conversation entity.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Optional, Tuple

from acl.messages import Message
from protocols.identifiers import ProtocolId
from terms.language import Bindings, EMPTY_BINDINGS, Predicate


class ConversationStatus(str, Enum):
    READY = "ready"
    ACTIVE = "active"
    COMPLETED = "completed"
    FAILED = "failed"
    STALE = "stale"
    CANCELLING = "cancelling"
    CANCELLED = "cancelled"

    def __str__(self) -> str:
        return self.value

    @property
    def is_terminal(self) -> bool:
        return self in TERMINAL_STATUSES

    @property
    def is_candidate(self) -> bool:
        """Only these statuses take part in matching."""
        return self in (ConversationStatus.READY, ConversationStatus.ACTIVE)


TERMINAL_STATUSES = frozenset({
    ConversationStatus.COMPLETED,
    ConversationStatus.FAILED,
    ConversationStatus.CANCELLED,
})


@dataclass(frozen=True)
class Conversation:
    protocol: ProtocolId
    participants: FrozenSet[str]
    current_state: str
    cid: str
    history: Tuple[Message, ...] = ()
    bindings: Bindings = EMPTY_BINDINGS
    status: ConversationStatus = ConversationStatus.ACTIVE
    annotations: FrozenSet[Predicate] = field(default_factory=frozenset)
    timeout_seconds: Optional[float] = None
    # reply-by of the last outbound message still waiting for an answer
    deadline: Optional[float] = None
    archived: bool = False

    def __post_init__(self):
        object.__setattr__(self, "participants", frozenset(self.participants))
        if len(self.participants) != 2:
            raise ValueError(f"a conversation has exactly two participants, got {sorted(self.participants)}")
        object.__setattr__(self, "annotations", frozenset(self.annotations))

    @property
    def length(self) -> int:
        return len(self.history)

    @property
    def last_message(self) -> Optional[Message]:
        return self.history[-1] if self.history else None

    def involves(self, agent: str) -> bool:
        return agent in self.participants

    def other_party(self, agent: str) -> str:
        others = self.participants - {agent}
        if len(others) != 1:
            raise ValueError(f"{agent} does not take part in {self.cid}")
        return next(iter(others))
