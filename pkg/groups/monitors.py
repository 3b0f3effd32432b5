"""
Group monitors: conditions over the conversations of a conversation group.

A monitor is created from a descriptor such as ``AllInState(proposed)``. The
descriptor names a registered monitor class and supplies exactly as many
parameters as the class declares. Each poll calls ``event`` with the group's
member conversations; a true result raises a group event carrying the
descriptor text.
"""
import logging
import re
from abc import ABC, abstractmethod
from typing import ClassVar, Dict, List, Sequence, Tuple, Type

from conversations.entities import Conversation, ConversationStatus
from core.errors import AcreError

logger = logging.getLogger(__name__)

_DESCRIPTOR_RE = re.compile(r"\s*([A-Za-z_][\w.]*)\s*\((.*)\)\s*")


class UnknownMonitor(AcreError):
    def __init__(self, name: str):
        super().__init__(f"no group monitor named {name!r}", "UNKNOWN_MONITOR")
        self.name = name


class MonitorArity(AcreError):
    def __init__(self, name: str, expected: int, given: int):
        super().__init__(f"{name} takes {expected} parameter(s), {given} given", "MONITOR_ARITY")


class GroupMonitor(ABC):
    """Subclasses set ``arity`` and implement ``event``; ``name`` defaults to the class name."""

    name: ClassVar[str] = ""
    arity: ClassVar[int] = 0

    def __init__(self, *params: str, descriptor: str = ""):
        if len(params) != self.arity:
            raise MonitorArity(self.monitor_name(), self.arity, len(params))
        self.params = params
        self.descriptor = descriptor or f"{self.monitor_name()}({','.join(params)})"

    @classmethod
    def monitor_name(cls) -> str:
        return cls.name or cls.__name__

    @abstractmethod
    def event(self, members: Sequence[Conversation]) -> bool:
        """True if the monitored condition raises an event on this poll."""

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.descriptor}>"


class AllInState(GroupMonitor):
    """Fires on every poll while all members are in the state."""

    arity = 1

    def event(self, members):
        state = self.params[0]
        return bool(members) and all(c.current_state == state for c in members)


class AllReachedState(GroupMonitor):
    """
    Fires once when all members are in the state, then stays silent until at
    least one member has been seen outside it.
    """

    arity = 1

    def __init__(self, *params, descriptor=""):
        super().__init__(*params, descriptor=descriptor)
        self._armed = True

    def event(self, members):
        state = self.params[0]
        if not members or any(c.current_state != state for c in members):
            self._armed = True
            return False
        if self._armed:
            self._armed = False
            return True
        return False


class NoneInState(GroupMonitor):
    arity = 1

    def event(self, members):
        state = self.params[0]
        return bool(members) and all(c.current_state != state for c in members)


class AllFinished(GroupMonitor):
    """Every member completed; failed, stale and cancelled members do not count as finished."""

    arity = 0

    def event(self, members):
        return bool(members) and all(c.status is ConversationStatus.COMPLETED for c in members)


DEFAULT_MONITORS: Tuple[Type[GroupMonitor], ...] = (AllInState, AllReachedState, NoneInState, AllFinished)

_registry: Dict[str, Type[GroupMonitor]] = {cls.monitor_name(): cls for cls in DEFAULT_MONITORS}


def register_monitor(cls: Type[GroupMonitor], *aliases: str) -> Type[GroupMonitor]:
    """Make ``cls`` available to descriptors under its name and any aliases."""
    if not (isinstance(cls, type) and issubclass(cls, GroupMonitor)):
        raise TypeError(f"{cls!r} is not a GroupMonitor")
    for name in (cls.monitor_name(), *aliases):
        _registry[name] = cls
    logger.debug(f"Registered group monitor {cls.monitor_name()}", extra={"aliases": list(aliases)})
    return cls


def registered_monitors() -> List[str]:
    return sorted(_registry)


def parse_monitor_descriptor(text: str) -> Tuple[str, Tuple[str, ...]]:
    match = _DESCRIPTOR_RE.fullmatch(text or "")
    if not match:
        raise UnknownMonitor((text or "").strip())
    name, raw = match.groups()
    params = tuple(p.strip() for p in raw.split(",")) if raw.strip() else ()
    return name, params


def create_monitor(descriptor: str) -> GroupMonitor:
    name, params = parse_monitor_descriptor(descriptor)
    cls = _registry.get(name)
    if cls is None:
        raise UnknownMonitor(name)
    return cls(*params, descriptor=descriptor.strip())
