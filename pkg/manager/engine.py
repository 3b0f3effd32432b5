"""
The per-agent Conversation Manager.

Messages the agent sends or receives are queued with ``submit`` and
processed by ``run_cycle``, which moves through the phases start,
initialise, match, fail, new, update and done. Within a cycle the queue is
drained in order; each message ends in exactly one outcome: an advanced
conversation, an ambiguous match, or no match at all (possibly after
marking a conversation failed).

Cancel traffic and inbound not-understood messages are handled before
matching so they never touch a protocol's state machine.
"""
import itertools
import logging
import threading
import time
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Dict, Iterator, List, Mapping, Optional, Tuple, Union

from django.conf import settings

from acl.codec import format_timestamp, serialize_message
from acl.messages import CANCEL_MARKER, Message
from acl.performatives import Performative, parse_performative
from conversations.entities import Conversation, ConversationStatus
from conversations.semantics import advance, initiates, matching_transitions, new_conversation
from core.errors import AcreError
from protocols.definitions import Protocol, Transition
from protocols.identifiers import ProtocolId
from terms.language import Predicate
from terms.parser import parse_ground_predicate

from .events import Event, EventKind, event
from .records import ArchivedRecord, ConversationRecord, HistoryRecord, ManagerSnapshot

logger = logging.getLogger(__name__)

Clock = Callable[[], float]
CycleHook = Callable[[], List[Event]]


class UnknownConversation(AcreError):
    def __init__(self, cid: str):
        super().__init__(f"no conversation {cid!r}", "UNKNOWN_CONVERSATION")
        self.cid = cid


class ConversationTerminal(AcreError):
    def __init__(self, cid: str, status: ConversationStatus):
        super().__init__(f"conversation {cid!r} is {status}", "CONVERSATION_TERMINAL")
        self.cid = cid


class UnknownProtocol(AcreError):
    def __init__(self, pid):
        super().__init__(f"protocol {pid} is not in the store", "UNKNOWN_PROTOCOL")
        self.pid = pid


class NotInvolved(AcreError):
    def __init__(self, agent: str, m: Message):
        super().__init__(f"{agent} neither sends nor receives this message ({m.sender} -> {m.receiver})", "NOT_INVOLVED")


class NotArchived(AcreError):
    def __init__(self, cid: str):
        super().__init__(f"conversation {cid!r} is not archived", "NOT_ARCHIVED")


class NoCancelPending(AcreError):
    def __init__(self, cid: str):
        super().__init__(f"no cancel request pending for {cid!r}", "NO_CANCEL_PENDING")


class NotCancellable(AcreError):
    def __init__(self, cid: str, status):
        super().__init__(f"conversation {cid!r} is {status.value}; only active conversations can be cancelled", "NOT_CANCELLABLE")


class CycleInProgress(AcreError):
    def __init__(self, agent: str, phase: "ManagerPhase"):
        super().__init__(f"{agent} is in phase {phase.value}", "CYCLE_IN_PROGRESS")


class ManagerPhase(str, Enum):
    START = "start"
    INITIALISE = "initialise"
    MATCH = "match"
    FAIL = "fail"
    NEW = "new"
    UPDATE = "update"
    DONE = "done"


@dataclass
class ManagerMemory:
    current_message: Optional[Message] = None
    # (conversation, triggered transitions); provisional conversations are not yet stored
    candidates: Tuple[Tuple[Conversation, Tuple[Transition, ...]], ...] = ()

    def clear(self):
        self.current_message = None
        self.candidates = ()

    @property
    def candidate_ids(self) -> Tuple[str, ...]:
        return tuple(c.cid for c, _ in self.candidates)


def _content(value: Union[None, str, Predicate]) -> Optional[Predicate]:
    if value is None or isinstance(value, Predicate):
        return value
    return parse_ground_predicate(value)


def _performative(value: Union[str, Performative]) -> Performative:
    return value if isinstance(value, Performative) else parse_performative(value)


class ConversationManager:
    def __init__(
        self,
        agent_name: str,
        protocols: Mapping[ProtocolId, Protocol],
        clock: Optional[Clock] = None,
        ids: Optional[Iterator[int]] = None,
        strict_formal: Optional[bool] = None,
    ):
        self.agent_name = agent_name
        self.protocols = protocols
        self.clock = clock or time.time
        self.strict_formal = (
            strict_formal if strict_formal is not None
            else getattr(settings, "ACRE_STRICT_FORMAL_ADVANCES", False)
        )
        self.phase = ManagerPhase.START
        self.memory = ManagerMemory()
        self.events: List[Event] = []
        self.outbox: List[Message] = []
        self.cycle = 0

        self._ids = ids or itertools.count(1)
        self._issued = set()
        self._queue = deque()
        self._queue_lock = threading.Lock()
        self._conversations: Dict[str, Conversation] = {}
        self._pending_cancel = set()
        self._added_protocols = deque()
        self._hooks: List[CycleHook] = []
        self._unsubscribe = None
        if hasattr(protocols, "subscribe"):
            self._unsubscribe = protocols.subscribe(self._added_protocols.append)

    def __repr__(self) -> str:
        return f"<ConversationManager {self.agent_name} cycle={self.cycle} phase={self.phase.value}>"

    # ------------------------------------------------------------------
    # queue and cycle
    # ------------------------------------------------------------------

    def submit(self, m: Message) -> None:
        if not m.involves(self.agent_name):
            raise NotInvolved(self.agent_name, m)
        with self._queue_lock:
            self._queue.append(m)

    @property
    def pending(self) -> int:
        with self._queue_lock:
            return len(self._queue)

    def _pop(self) -> Optional[Message]:
        with self._queue_lock:
            return self._queue.popleft() if self._queue else None

    def reset(self) -> None:
        if self.phase is ManagerPhase.DONE:
            self.phase = ManagerPhase.START

    def add_cycle_hook(self, hook: CycleHook) -> None:
        """``hook()`` runs at the end of every cycle; the events it returns join the cycle's events."""
        self._hooks.append(hook)

    def run_cycle(self) -> List[Event]:
        self.reset()
        if self.phase is not ManagerPhase.START:
            raise CycleInProgress(self.agent_name, self.phase)

        self.cycle += 1
        self.events = []
        self.memory.clear()
        while self._added_protocols:
            self._emit(event(EventKind.PROTOCOL_ADDED, self._added_protocols.popleft()))

        self.phase = ManagerPhase.INITIALISE
        while True:
            m = self._pop()
            if m is None:
                break
            self.memory.current_message = m
            if not self._intercept(m):
                self.phase = ManagerPhase.MATCH
                self._match(m)
                self.phase = ManagerPhase.FAIL
                self._fail(m)
                self.phase = ManagerPhase.NEW
                self._new(m)
                self.phase = ManagerPhase.UPDATE
                self._update(m)
                self.phase = ManagerPhase.INITIALISE
            self.memory.clear()

        self.check_timeouts(self.clock())
        for hook in self._hooks:
            for e in hook():
                self._emit(e)

        self.phase = ManagerPhase.DONE
        logger.debug(f"{self.agent_name} finished cycle {self.cycle}", extra={
            "agent": self.agent_name,
            "cycle": self.cycle,
            "events": len(self.events),
        })
        return list(self.events)

    def _emit(self, e: Event) -> Event:
        self.events.append(e)
        return e

    def _protocol(self, pid: ProtocolId) -> Protocol:
        try:
            return self.protocols[pid]
        except KeyError:
            raise UnknownProtocol(pid) from None

    def _live(self):
        return [c for c in self._conversations.values() if not c.archived and c.status.is_candidate]

    def _match(self, m: Message) -> None:
        pair = frozenset({m.sender, m.receiver})
        found = []
        for c in self._live():
            # a conversation that has not started only takes messages between its own participants
            if c.status is ConversationStatus.READY and pair != c.participants:
                continue
            p = self.protocols.get(c.protocol)
            if p is None:
                continue
            transitions = matching_transitions(m, c, p, self.strict_formal)
            if transitions:
                found.append((c, tuple(transitions)))
        self.memory.candidates = tuple(found)

    def _fail(self, m: Message) -> None:
        if m.conversation_id is None:
            return
        c = self._conversations.get(m.conversation_id)
        if c is None or c.archived or c.status is not ConversationStatus.ACTIVE:
            return
        if c.cid in self.memory.candidate_ids:
            return
        self._conversations[c.cid] = replace(c, status=ConversationStatus.FAILED, deadline=None)
        self._emit(event(EventKind.FAILED, c.cid, message=m, state=c.current_state))
        logger.info(f"Conversation {c.cid} failed", extra={"agent": self.agent_name, "cid": c.cid})

    def _new(self, m: Message) -> None:
        if self.memory.candidates:
            return
        # any known id, live or not, rules out a new conversation under it
        if m.conversation_id is not None and m.conversation_id in self._conversations:
            return
        if m.sender == m.receiver:
            return
        initiated = [
            self.protocols[pid] for pid in sorted(self.protocols)
            if initiates(m, self.protocols[pid])
        ]
        if not initiated:
            return
        if m.conversation_id is not None and len(initiated) > 1:
            # the sender named the conversation, so exactly one is started
            self._emit(event(
                EventKind.WARNING, m.conversation_id, message=m,
                reason=f"{len(initiated)} protocols start with this message; using {initiated[0].id}",
            ))
            initiated = initiated[:1]
        cid = m.conversation_id if m.conversation_id is not None else self.next_id()
        provisional = []
        for p in initiated:
            c = new_conversation(m, p, lambda: cid)
            provisional.append((c, tuple(matching_transitions(m, c, p, self.strict_formal))))
        self.memory.candidates = tuple(provisional)

    def _update(self, m: Message) -> None:
        candidates = self.memory.candidates
        if not candidates:
            self._emit(event(EventKind.UNMATCHED, _subject(m), message=m))
            logger.info("Unmatched message", extra={"agent": self.agent_name, "performative": m.performative.value})
            return
        if len(candidates) > 1:
            names = ",".join(f"{c.cid}@{c.protocol}" for c, _ in candidates)
            self._emit(event(EventKind.AMBIGUOUS, _subject(m), message=m, candidates=names))
            logger.info("Ambiguous message", extra={"agent": self.agent_name, "candidates": names})
            return

        c, transitions = candidates[0]
        p = self.protocols[c.protocol]
        if len(transitions) > 1:
            self._emit(event(
                EventKind.WARNING, c.cid, message=m,
                reason=f"{len(transitions)} transitions match in state {c.current_state}",
            ))
        after = advance(m, c, p, transitions[0])
        if m.sender == self.agent_name:
            after = replace(after, deadline=m.reply_by)
        else:
            after = replace(after, deadline=None)
        self._conversations[after.cid] = after

        if not c.history:
            self._emit(event(EventKind.STARTED, c.cid, message=m, protocol=c.protocol))
            logger.info(f"Conversation {c.cid} started", extra={
                "agent": self.agent_name,
                "cid": c.cid,
                "protocol": str(c.protocol),
            })
        self._emit(event(
            EventKind.ADVANCED, after.cid, message=m,
            state=after.current_state,
            length=after.length,
            performative=m.performative.value,
            content=m.content,
            direction="sent" if m.sender == self.agent_name else "received",
            bindings=after.bindings.render(),
        ))
        if after.status is ConversationStatus.COMPLETED:
            self._emit(event(EventKind.COMPLETED, after.cid, message=m, state=after.current_state))
            logger.info(f"Conversation {after.cid} completed", extra={"agent": self.agent_name, "cid": after.cid})

    # ------------------------------------------------------------------
    # cancel meta-protocol and not-understood
    # ------------------------------------------------------------------

    def _intercept(self, m: Message) -> bool:
        if m.is_cancel_traffic:
            if m.receiver == self.agent_name:
                self._receive_cancel_traffic(m)
            else:
                self._note_sent_cancel_traffic(m)
            return True
        if m.performative is Performative.NOT_UNDERSTOOD and m.receiver == self.agent_name:
            c = self._conversations.get(m.conversation_id) if m.conversation_id else None
            if c is not None and not c.archived and not c.status.is_terminal:
                self._conversations[c.cid] = replace(c, status=ConversationStatus.FAILED, deadline=None)
                self._emit(event(EventKind.FAILED, c.cid, message=m, state=c.current_state, reason="not-understood"))
                return True
        return False

    def _receive_cancel_traffic(self, m: Message) -> None:
        c = self._conversations.get(m.conversation_id) if m.conversation_id else None
        if c is None or c.archived or c.status.is_terminal:
            self._emit(event(EventKind.UNMATCHED, _subject(m), message=m))
            return
        if m.performative is Performative.CANCEL:
            self._pending_cancel.add(c.cid)
            self._emit(event(EventKind.CANCEL_REQUEST, c.cid, message=m, sender=m.sender))
        elif c.status is not ConversationStatus.CANCELLING:
            self._emit(event(EventKind.UNMATCHED, _subject(m), message=m))
        elif m.performative is Performative.INFORM:
            self._conversations[c.cid] = replace(c, status=ConversationStatus.CANCELLED, deadline=None)
            self._emit(event(EventKind.CANCEL_CONFIRMED, c.cid, message=m))
        else:
            self._conversations[c.cid] = replace(c, status=ConversationStatus.ACTIVE)
            self._emit(event(EventKind.CANCEL_FAILED, c.cid, message=m))

    def _note_sent_cancel_traffic(self, m: Message) -> None:
        # replayed traces contain the agent's own meta messages
        c = self._conversations.get(m.conversation_id) if m.conversation_id else None
        if c is None or c.archived or c.status.is_terminal:
            return
        if m.performative is Performative.CANCEL:
            if c.status is ConversationStatus.ACTIVE:
                self._conversations[c.cid] = replace(c, status=ConversationStatus.CANCELLING)
        elif m.performative is Performative.INFORM:
            self._pending_cancel.discard(c.cid)
            self._conversations[c.cid] = replace(c, status=ConversationStatus.CANCELLED, deadline=None)
        else:
            self._pending_cancel.discard(c.cid)

    def _send(self, m: Message) -> Message:
        self.outbox.append(m)
        logger.debug(f"{self.agent_name} sends {m.performative.value}", extra={
            "agent": self.agent_name,
            "receiver": m.receiver,
            "cid": m.conversation_id,
        })
        return m

    def cancel(self, cid: str) -> Message:
        c = self._require_open(cid)
        if c.status is not ConversationStatus.ACTIVE:
            raise NotCancellable(cid, c.status)
        self._conversations[cid] = replace(c, status=ConversationStatus.CANCELLING)
        return self._send(Message(
            Performative.CANCEL, self.agent_name, c.other_party(self.agent_name),
            conversation_id=cid, protocol_id=c.protocol, reply_with=CANCEL_MARKER,
        ))

    def confirm_cancel(self, cid: str) -> Message:
        c = self._require_pending_cancel(cid)
        self._conversations[cid] = replace(c, status=ConversationStatus.CANCELLED, deadline=None)
        return self._send(Message(
            Performative.INFORM, self.agent_name, c.other_party(self.agent_name),
            conversation_id=cid, protocol_id=c.protocol, in_reply_to=CANCEL_MARKER,
        ))

    def deny_cancel(self, cid: str) -> Message:
        c = self._require_pending_cancel(cid)
        return self._send(Message(
            Performative.FAILURE, self.agent_name, c.other_party(self.agent_name),
            conversation_id=cid, protocol_id=c.protocol, in_reply_to=CANCEL_MARKER,
        ))

    def _require_pending_cancel(self, cid: str) -> Conversation:
        c = self._known(cid)
        if cid not in self._pending_cancel:
            raise NoCancelPending(cid)
        self._pending_cancel.discard(cid)
        return c

    def send_not_understood(self, m: Message) -> Message:
        """Tell the sender of ``m`` it was not understood; the reply cites the same conversation id."""
        return self._send(Message(
            Performative.NOT_UNDERSTOOD, self.agent_name, m.sender,
            content=Predicate(m.performative.value),
            conversation_id=m.conversation_id,
        ))

    # ------------------------------------------------------------------
    # agent actions
    # ------------------------------------------------------------------

    def next_id(self) -> str:
        while True:
            cid = f"{self.agent_name}-{next(self._ids)}"
            if cid not in self._issued and cid not in self._conversations:
                self._issued.add(cid)
                return cid

    def start_conversation(self, pid: Union[str, ProtocolId], other: str) -> str:
        pid = ProtocolId.parse(pid) if isinstance(pid, str) else pid
        p = self._protocol(pid)
        c = Conversation(
            protocol=pid,
            participants=frozenset({self.agent_name, other}),
            current_state=p.initial_state().name,
            cid=self.next_id(),
            status=ConversationStatus.READY,
        )
        self._conversations[c.cid] = c
        logger.info(f"{self.agent_name} opened conversation {c.cid}", extra={
            "agent": self.agent_name,
            "cid": c.cid,
            "protocol": str(pid),
            "other": other,
        })
        return c.cid

    def start_and_send(self, pid, other: str, performative, content=None) -> str:
        cid = self.start_conversation(pid, other)
        self.advance_conversation(cid, performative, content)
        return cid

    def advance_conversation(self, cid: str, performative, content=None) -> Message:
        """Send the next message of ``cid``; the conversation moves when a cycle processes it."""
        c = self._require_open(cid)
        now = self.clock()
        m = Message(
            _performative(performative),
            self.agent_name,
            c.other_party(self.agent_name),
            content=_content(content),
            conversation_id=cid,
            protocol_id=c.protocol,
            reply_by=now + c.timeout_seconds if c.timeout_seconds is not None else None,
        )
        self._send(m)
        self.submit(m)
        return m

    def set_timeout(self, cid: str, seconds: Optional[float]) -> None:
        c = self._known(cid)
        self._conversations[cid] = replace(c, timeout_seconds=seconds)

    def check_timeouts(self, now: float) -> List[Event]:
        fired = []
        for c in list(self._conversations.values()):
            # a pending cancel suspends the reply-by deadline
            if c.archived or c.deadline is None or c.status.is_terminal or c.status is ConversationStatus.CANCELLING:
                continue
            if c.deadline < now:
                self._conversations[c.cid] = replace(c, status=ConversationStatus.STALE, deadline=None)
                fired.append(self._emit(event(EventKind.TIMEOUT, c.cid, deadline=format_timestamp(c.deadline))))
                logger.info(f"Conversation {c.cid} timed out", extra={"agent": self.agent_name, "cid": c.cid})
        return fired

    def forget(self, cid: str) -> None:
        self._known(cid)
        del self._conversations[cid]
        self._pending_cancel.discard(cid)

    def archive(self, cid: str) -> None:
        c = self._known(cid)
        self._conversations[cid] = replace(c, archived=True)

    def recall(self, cid: str) -> None:
        c = self._known(cid)
        if not c.archived:
            raise NotArchived(cid)
        self._conversations[cid] = replace(c, archived=False)

    def annotate(self, cid: str, annotation) -> None:
        c = self._known(cid)
        self._conversations[cid] = replace(c, annotations=c.annotations | {_content(annotation)})

    def deannotate(self, cid: str, annotation=None) -> None:
        """Remove one annotation, or all of them when none is named."""
        c = self._known(cid)
        remaining = frozenset() if annotation is None else c.annotations - {_content(annotation)}
        self._conversations[cid] = replace(c, annotations=remaining)

    def drain_outbox(self) -> List[Message]:
        sent, self.outbox = self.outbox, []
        return sent

    # ------------------------------------------------------------------
    # knowledge
    # ------------------------------------------------------------------

    def conversation(self, cid: str) -> Conversation:
        return self._known(cid)

    def conversations(self, include_archived: bool = False) -> List[Conversation]:
        return [c for c in self._conversations.values() if include_archived or not c.archived]

    def snapshot(self) -> ManagerSnapshot:
        live, archived = [], []
        for cid in sorted(self._conversations):
            c = self._conversations[cid]
            other = c.other_party(self.agent_name) if c.involves(self.agent_name) else ",".join(sorted(c.participants))
            if c.archived:
                archived.append(ArchivedRecord(cid, c.protocol, other))
                continue
            live.append(ConversationRecord(
                cid=cid,
                status=c.status.value,
                other=other,
                protocol=c.protocol,
                state=c.current_state,
                length=c.length,
                bindings=c.bindings.render(),
                annotations=tuple(sorted(str(a) for a in c.annotations)),
                history=tuple(
                    HistoryRecord(
                        index,
                        "sent" if m.sender == self.agent_name else "received",
                        m.performative.value,
                        str(m.content) if m.content is not None else "",
                    )
                    for index, m in enumerate(c.history, start=1)
                ),
            ))
        return ManagerSnapshot(self.agent_name, tuple(sorted(self.protocols)), tuple(live), tuple(archived))

    def _known(self, cid: str) -> Conversation:
        try:
            return self._conversations[cid]
        except KeyError:
            raise UnknownConversation(cid) from None

    def _require_open(self, cid: str) -> Conversation:
        c = self._known(cid)
        if c.archived:
            raise UnknownConversation(cid)
        if c.status.is_terminal:
            raise ConversationTerminal(cid, c.status)
        return c

    def close(self) -> None:
        if self._unsubscribe is not None:
            self._unsubscribe()
            self._unsubscribe = None


def _subject(m: Message) -> str:
    return serialize_message(m)
