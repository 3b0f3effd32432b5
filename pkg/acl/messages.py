"""
ACL message value type.
"""
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from protocols.identifiers import ProtocolId
from terms.language import ABSENT_CONTENT, Predicate, is_ground_predicate

from .performatives import Performative

# Parameter used by the cancel meta-protocol in reply-with / in-reply-to.
CANCEL_MARKER = "cancel"

# FIPA parameters that are carried through untouched.
PRESERVED_PARAMETERS = ("reply-to", "language", "encoding", "ontology")


@dataclass(frozen=True)
class Message:
    performative: Performative
    sender: str
    receiver: str
    content: Optional[Predicate] = None
    conversation_id: Optional[str] = None
    protocol_id: Optional[ProtocolId] = None
    reply_by: Optional[float] = None
    reply_with: Optional[str] = None
    in_reply_to: Optional[str] = None
    # (key, value) pairs for preserved and "x-" parameters, kept in canonical order
    extras: Tuple[Tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        if not self.sender or not self.receiver:
            raise ValueError("a message needs a sender and a receiver")
        if self.content is not None and not is_ground_predicate(self.content):
            raise ValueError(f"message content must be grounded: {self.content}")
        object.__setattr__(self, "extras", canonical_extras(self.extras))

    @property
    def matchable_content(self) -> Predicate:
        """Content as seen by matching; absent content becomes a marker predicate."""
        return self.content if self.content is not None else ABSENT_CONTENT

    def involves(self, agent: str) -> bool:
        return agent in (self.sender, self.receiver)

    def other_party(self, agent: str) -> str:
        return self.receiver if self.sender == agent else self.sender

    @property
    def is_cancel_traffic(self) -> bool:
        """True for messages of the cancel meta-protocol."""
        if self.performative is Performative.CANCEL and self.reply_with == CANCEL_MARKER:
            return True
        return (
            self.in_reply_to == CANCEL_MARKER
            and self.performative in (Performative.INFORM, Performative.FAILURE)
        )

    def with_receiver(self, receiver: str) -> "Message":
        return replace(self, receiver=receiver)


def _extra_rank(key: str):
    if key in PRESERVED_PARAMETERS:
        return (0, PRESERVED_PARAMETERS.index(key), key)
    return (1, 0, key)


def canonical_extras(extras) -> Tuple[Tuple[str, str], ...]:
    return tuple(sorted(((k, v) for k, v in extras), key=lambda kv: _extra_rank(kv[0])))
