"""
Matching messages against transitions, protocols and conversations.

Bindings are threaded through a transition in a fixed order: the sender
is matched first, then the receiver under the sender's bindings, then the
content under both.
"""
import logging
from dataclasses import replace
from typing import Callable, List, Optional

from django.conf import settings

from acl.messages import Message
from protocols.definitions import Protocol, ProtocolInvalid, Transition
from terms.language import (
    ABSENT_CONTENT,
    Bindings,
    Constant,
    EMPTY_BINDINGS,
    Predicate,
    Variable,
)
from terms.matching import combine, papply, pbind, pmatches, tapply, tbind, tmatches

from .entities import Conversation, ConversationStatus

logger = logging.getLogger(__name__)


def _bind_party(pattern, agent: str, bindings: Bindings) -> Optional[Bindings]:
    applied = tapply(pattern, bindings)
    ground = Constant(agent)
    if not tmatches(applied, ground):
        return None
    return combine(bindings, tbind(applied, ground))


def _bind_content(pattern, content: Predicate, bindings: Bindings) -> Optional[Bindings]:
    if isinstance(pattern, Variable):
        if pattern.is_anonymous:
            return bindings
        # a named variable stands for a whole, present content
        if content == ABSENT_CONTENT:
            return None
        applied = tapply(pattern, bindings)
        if isinstance(applied, Variable):
            return combine(bindings, Bindings({pattern.name: content.as_term()}))
        return bindings if applied == content.as_term() else None
    applied = papply(pattern, bindings)
    if not pmatches(applied, content):
        return None
    return combine(bindings, pbind(applied, content))


def bind_message(m: Message, t: Transition, bindings: Bindings = EMPTY_BINDINGS) -> Optional[Bindings]:
    """Bindings after ``m`` triggers ``t``, or None if it does not."""
    if m.performative != t.performative:
        return None
    after_sender = _bind_party(t.sender, m.sender, bindings)
    if after_sender is None:
        return None
    after_receiver = _bind_party(t.receiver, m.receiver, after_sender)
    if after_receiver is None:
        return None
    return _bind_content(t.content, m.matchable_content, after_receiver)


def triggers(m: Message, t: Transition, bindings: Bindings = EMPTY_BINDINGS) -> bool:
    return bind_message(m, t, bindings) is not None


def initiating_transitions(m: Message, p: Protocol) -> List[Transition]:
    if m.protocol_id is not None and m.protocol_id != p.id:
        return []
    try:
        start = p.initial_state().name
    except ProtocolInvalid:
        return []
    return [t for t in p.outgoing(start) if triggers(m, t, EMPTY_BINDINGS)]


def initiates(m: Message, p: Protocol) -> bool:
    return bool(initiating_transitions(m, p))


def _strict_formal(strict_formal: Optional[bool]) -> bool:
    if strict_formal is None:
        return getattr(settings, "ACRE_STRICT_FORMAL_ADVANCES", False)
    return strict_formal


def matching_transitions(
    m: Message,
    c: Conversation,
    p: Protocol,
    strict_formal: Optional[bool] = None,
) -> List[Transition]:
    """
    Transitions out of the conversation's current state that ``m`` triggers.

    A message naming another conversation id never matches. Unless
    ``strict_formal`` is set, neither does one naming another protocol.
    """
    if c.status.is_terminal:
        return []
    if m.conversation_id is not None and m.conversation_id != c.cid:
        return []
    if not _strict_formal(strict_formal) and m.protocol_id is not None and m.protocol_id != c.protocol:
        return []
    return [t for t in p.outgoing(c.current_state) if triggers(m, t, c.bindings)]


def advances(
    m: Message,
    c: Conversation,
    p: Protocol,
    strict_formal: Optional[bool] = None,
) -> Optional[Transition]:
    """The transition ``m`` triggers in ``c``; the first in definition order if several do."""
    matches = matching_transitions(m, c, p, strict_formal)
    if not matches:
        return None
    if len(matches) > 1:
        logger.warning(f"{len(matches)} transitions match in conversation {c.cid}", extra={
            "cid": c.cid,
            "protocol": str(c.protocol),
            "state": c.current_state,
        })
    return matches[0]


def advance(m: Message, c: Conversation, p: Protocol, t: Optional[Transition] = None) -> Conversation:
    """
    Move ``c`` along the transition ``m`` triggers.

    Callers check ``advances`` first; passing a transition skips the
    search. Raises ValueError when ``m`` does not trigger it.
    """
    t = t or advances(m, c, p)
    bindings = bind_message(m, t, c.bindings) if t is not None else None
    if bindings is None:
        raise ValueError(f"message does not advance conversation {c.cid}")
    status = ConversationStatus.COMPLETED if p.is_final(t.to_state) else ConversationStatus.ACTIVE
    return replace(
        c,
        current_state=t.to_state,
        history=c.history + (m,),
        bindings=bindings,
        status=status,
    )


def new_conversation(m: Message, p: Protocol, fresh_id: Callable[[], str]) -> Conversation:
    """A fresh conversation ``m`` could start; ``m`` itself is not yet in its history."""
    return Conversation(
        protocol=p.id,
        participants=frozenset({m.sender, m.receiver}),
        current_state=p.initial_state().name,
        cid=m.conversation_id if m.conversation_id is not None else fresh_id(),
    )
