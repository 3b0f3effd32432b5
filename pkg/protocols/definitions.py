"""
Protocol model: states, transitions and the protocol itself.

Initial and final states are not declared; they are derived. The initial
state is the single state without incoming transitions, final states are
those without outgoing transitions.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Optional, Tuple

from acl.performatives import Performative
from core.errors import AcreError
from terms.language import ContentPattern, Term

from .identifiers import ProtocolId


class ProtocolInvalid(AcreError):
    def __init__(self, message: str):
        super().__init__(message, "PROTOCOL_INVALID")


@dataclass(frozen=True)
class State:
    name: str
    protocol: ProtocolId


@dataclass(frozen=True)
class Transition:
    protocol: ProtocolId
    from_state: str
    to_state: str
    performative: Performative
    sender: Term
    receiver: Term
    content: ContentPattern
    # set when the transition was pulled in through an import
    imported_from: Optional[ProtocolId] = field(default=None, compare=False)

    def label(self) -> str:
        return f"{self.performative.value} / {self.sender}→{self.receiver} / {self.content}"


@dataclass(frozen=True, eq=False)
class Protocol:
    id: ProtocolId
    states: Tuple[State, ...] = ()
    transitions: Tuple[Transition, ...] = ()
    description: Optional[str] = None
    imports: Tuple[ProtocolId, ...] = ()

    # States compare as a set, transitions as a sequence.
    def _key(self):
        return (self.id, frozenset(self.states), self.transitions, self.description, self.imports)

    def __eq__(self, other):
        if not isinstance(other, Protocol):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @cached_property
    def state_names(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.states)

    def state(self, name: str) -> State:
        for s in self.states:
            if s.name == name:
                return s
        raise KeyError(name)

    def outgoing(self, state_name: str) -> Tuple[Transition, ...]:
        return tuple(t for t in self.transitions if t.from_state == state_name)

    @cached_property
    def initial_candidates(self) -> Tuple[str, ...]:
        targets = {t.to_state for t in self.transitions}
        return tuple(name for name in self.state_names if name not in targets)

    def initial_state(self) -> State:
        candidates = self.initial_candidates
        if len(candidates) != 1:
            raise ProtocolInvalid(
                f"{self.id} has {len(candidates)} candidate initial states: {', '.join(candidates) or 'none'}"
            )
        return self.state(candidates[0])

    def final_states(self) -> FrozenSet[State]:
        sources = {t.from_state for t in self.transitions}
        return frozenset(s for s in self.states if s.name not in sources)

    @cached_property
    def final_state_names(self) -> FrozenSet[str]:
        return frozenset(s.name for s in self.final_states())

    def is_final(self, state_name: str) -> bool:
        return state_name in self.final_state_names


def initial_state(p: Protocol) -> State:
    return p.initial_state()


def final_states(p: Protocol) -> FrozenSet[State]:
    return p.final_states()
