"""
Group Reasoner: agent groups, conversation groups and group monitors on top
of one agent's conversation manager.

Group actions only ever reach conversations through the manager's own
operations, so conversation state changes in the manager's cycle like any
other message. Monitors are polled at the end of every cycle.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set

from acl.messages import Message
from conversations.entities import Conversation
from core.errors import AcreError
from manager.engine import ConversationManager, ConversationTerminal, UnknownConversation, UnknownProtocol
from manager.events import Event, EventKind, event
from manager.records import record_line
from protocols.identifiers import ProtocolId
from terms.language import Predicate
from terms.parser import parse_ground_predicate

from .monitors import GroupMonitor, create_monitor

logger = logging.getLogger(__name__)


class DuplicateGroup(AcreError):
    def __init__(self, gid: str):
        super().__init__(f"group {gid!r} already exists", "DUPLICATE_GROUP")


class UnknownGroup(AcreError):
    def __init__(self, gid: str):
        super().__init__(f"no group {gid!r}", "UNKNOWN_GROUP")
        self.gid = gid


class EmptyGroup(AcreError):
    def __init__(self, gid: str):
        super().__init__(f"agent group {gid!r} has no one to talk to", "EMPTY_GROUP")


class GroupProtocolMismatch(AcreError):
    def __init__(self, gid: str, expected: ProtocolId, given: ProtocolId):
        super().__init__(f"group {gid!r} follows {expected}, not {given}", "GROUP_PROTOCOL_MISMATCH")


@dataclass
class AgentGroup:
    id: str
    members: Set[str] = field(default_factory=set)


@dataclass
class ConversationGroup:
    id: str
    protocol: Optional[ProtocolId] = None
    # insertion order, so group-wide actions run in a stable order
    members: List[str] = field(default_factory=list)
    monitors: List[GroupMonitor] = field(default_factory=list)
    annotations: Set[Predicate] = field(default_factory=set)


def _predicate(value) -> Predicate:
    return value if isinstance(value, Predicate) else parse_ground_predicate(value)


class GroupReasoner:
    def __init__(self, manager: ConversationManager):
        self.manager = manager
        self._agent_groups: Dict[str, AgentGroup] = {}
        self._groups: Dict[str, ConversationGroup] = {}
        manager.add_cycle_hook(self.poll_all)

    # agent groups

    def new_agent_group(self, agid: str, members: Iterable[str] = ()) -> AgentGroup:
        if agid in self._agent_groups:
            raise DuplicateGroup(agid)
        group = AgentGroup(agid)
        self._agent_groups[agid] = group
        self.add_agents(agid, members)
        return group

    def agent_group(self, agid: str) -> AgentGroup:
        try:
            return self._agent_groups[agid]
        except KeyError:
            raise UnknownGroup(agid) from None

    def add_agents(self, agid: str, names: Iterable[str]) -> None:
        self.agent_group(agid).members.update(names)

    def remove_agents(self, agid: str, names: Iterable[str]) -> None:
        self.agent_group(agid).members.difference_update(names)

    def disband(self, agid: str) -> None:
        self.agent_group(agid)
        del self._agent_groups[agid]

    # conversation groups

    def group(self, gid: str) -> ConversationGroup:
        try:
            return self._groups[gid]
        except KeyError:
            raise UnknownGroup(gid) from None

    def new_group(self, gid: Optional[str] = None) -> str:
        gid = gid or self.manager.next_id()
        if gid in self._groups:
            raise DuplicateGroup(gid)
        self._groups[gid] = ConversationGroup(gid)
        return gid

    def add(self, gid: str, cid: str) -> None:
        group = self.group(gid)
        c = self.manager.conversation(cid)
        if group.protocol is None:
            group.protocol = c.protocol
        elif group.protocol != c.protocol:
            raise GroupProtocolMismatch(gid, group.protocol, c.protocol)
        if cid not in group.members:
            group.members.append(cid)

    def remove(self, gid: str, cid: str) -> None:
        group = self.group(gid)
        if cid in group.members:
            group.members.remove(cid)

    def start_group(self, pid, agid: str, performative=None, content=None, gid: Optional[str] = None) -> str:
        """One conversation per member of ``agid``; with a performative, the same first message goes to each."""
        pid = ProtocolId.parse(pid) if isinstance(pid, str) else pid
        if pid not in self.manager.protocols:
            raise UnknownProtocol(pid)
        others = sorted(self.agent_group(agid).members - {self.manager.agent_name})
        if not others:
            raise EmptyGroup(agid)
        gid = self.new_group(gid)
        for other in others:
            if performative is None:
                cid = self.manager.start_conversation(pid, other)
            else:
                cid = self.manager.start_and_send(pid, other, performative, content)
            self.add(gid, cid)
        logger.info(f"Started conversation group {gid}", extra={
            "agent": self.manager.agent_name,
            "group": gid,
            "protocol": str(pid),
            "size": len(others),
        })
        return gid

    def advance_all(self, gid: str, performative, content=None) -> List[Message]:
        """Send the message in every member conversation; finished members are skipped."""
        sent = []
        for cid in list(self.group(gid).members):
            try:
                sent.append(self.manager.advance_conversation(cid, performative, content))
            except (ConversationTerminal, UnknownConversation) as e:
                logger.info(f"Skipped {cid} in group {gid}: {e}", extra={"group": gid, "cid": cid})
        return sent

    def set_timeout(self, gid: str, seconds: Optional[float]) -> None:
        for cid in self.group(gid).members:
            self.manager.set_timeout(cid, seconds)

    def annotate(self, gid: str, annotation) -> None:
        self.group(gid).annotations.add(_predicate(annotation))

    def deannotate(self, gid: str, annotation=None) -> None:
        group = self.group(gid)
        if annotation is None:
            group.annotations.clear()
        else:
            group.annotations.discard(_predicate(annotation))

    # monitors

    def watch(self, gid: str, descriptors: Iterable[str]) -> None:
        group = self.group(gid)
        # all or nothing
        monitors = [create_monitor(d) for d in descriptors]
        group.monitors.extend(monitors)

    def unwatch(self, gid: str, descriptors: Optional[Iterable[str]] = None) -> None:
        group = self.group(gid)
        if descriptors is None:
            group.monitors.clear()
            return
        wanted = {d.strip() for d in descriptors}
        group.monitors[:] = [m for m in group.monitors if m.descriptor not in wanted]

    def members(self, gid: str) -> List[Conversation]:
        """Member conversations still known to the manager."""
        found = []
        for cid in self.group(gid).members:
            try:
                found.append(self.manager.conversation(cid))
            except UnknownConversation:
                continue
        return found

    def poll(self, gid: str) -> List[Event]:
        group = self.group(gid)
        members = self.members(gid)
        fired = []
        for monitor in group.monitors:
            if monitor.event(members):
                fired.append(event(EventKind.GROUP_EVENT, gid, monitor=monitor.descriptor))
        return fired

    def poll_all(self) -> List[Event]:
        fired = []
        for gid in sorted(self._groups):
            fired.extend(self.poll(gid))
        return fired

    def record_lines(self) -> List[str]:
        lines = []
        for agid in sorted(self._agent_groups):
            lines.extend(record_line("agentGroup", agid, name) for name in sorted(self._agent_groups[agid].members))
        for gid in sorted(self._groups):
            group = self._groups[gid]
            lines.append(record_line("conversationGroup", gid, group.protocol))
            lines.append(record_line("groupSize", gid, len(group.members)))
            lines.extend(record_line("groupMember", gid, cid) for cid in group.members)
            lines.extend(record_line("groupMonitor", gid, m.descriptor) for m in group.monitors)
            lines.extend(record_line("groupAnnotation", gid, a) for a in sorted(str(a) for a in group.annotations))
        return lines
