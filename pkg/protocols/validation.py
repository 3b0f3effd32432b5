"""
Structural checks on resolved protocols.

Errors make a protocol unusable: no single initial state, transitions
over undeclared states, mutable sender or receiver patterns, unresolved
imports. Warnings flag possible nondeterminism, unreachable states and
the absence of a final state.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import List

from terms.language import Constant, Function, Variable

from .definitions import Protocol, Transition
from .identifiers import ProtocolId

logger = logging.getLogger(__name__)


@dataclass
class ValidationReport:
    protocol: ProtocolId
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def lines(self) -> List[str]:
        return [f"error: {e}" for e in self.errors] + [f"warning: {w}" for w in self.warnings]


def terms_overlap(a, b) -> bool:
    """Could some binding make both patterns match one ground term? Variables overlap anything."""
    if isinstance(a, Variable) or isinstance(b, Variable):
        return True
    if isinstance(a, Constant) or isinstance(b, Constant):
        return a == b
    return (
        a.functor == b.functor
        and a.arity == b.arity
        and all(terms_overlap(x, y) for x, y in zip(a.args, b.args))
    )


def contents_overlap(a, b) -> bool:
    if isinstance(a, Variable) or isinstance(b, Variable):
        return True
    if a.symbol != b.symbol or a.arity != b.arity:
        return False
    return all(terms_overlap(x, y) for x, y in zip(a.args, b.args))


def transitions_overlap(t1: Transition, t2: Transition) -> bool:
    return (
        t1.from_state == t2.from_state
        and t1.performative == t2.performative
        and terms_overlap(t1.sender, t2.sender)
        and terms_overlap(t1.receiver, t2.receiver)
        and contents_overlap(t1.content, t2.content)
    )


def _reachable(p: Protocol, start: str) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for t in p.outgoing(state):
            if t.to_state not in seen:
                seen.add(t.to_state)
                queue.append(t.to_state)
    return seen


def validate_protocol(p: Protocol) -> ValidationReport:
    report = ValidationReport(p.id)
    declared = set(p.state_names)

    if p.imports:
        report.errors.append("unresolved imports: " + ", ".join(str(pid) for pid in p.imports))

    candidates = p.initial_candidates
    if not candidates:
        report.errors.append("no initial state: every state has an incoming transition")
    elif len(candidates) > 1:
        report.errors.append("multiple initial states: " + ", ".join(candidates))

    for index, t in enumerate(p.transitions, start=1):
        for endpoint in (t.from_state, t.to_state):
            if endpoint not in declared:
                report.errors.append(f"transition {index} ({t.label()}) refers to undeclared state {endpoint!r}")
        for role, term in (("sender", t.sender), ("receiver", t.receiver)):
            if isinstance(term, Variable) and term.is_mutable:
                report.errors.append(f"transition {index} has a mutable {role} {term}")
            if isinstance(term, Function):
                report.errors.append(f"transition {index} has a compound {role} {term}")

    for i, t1 in enumerate(p.transitions):
        for j in range(i + 1, len(p.transitions)):
            t2 = p.transitions[j]
            if transitions_overlap(t1, t2):
                report.warnings.append(
                    f"possible nondeterminism in state {t1.from_state!r}: "
                    f"transitions {i + 1} and {j + 1} can both match one {t1.performative.value} message"
                )

    if len(candidates) == 1:
        unreachable = [name for name in p.state_names if name not in _reachable(p, candidates[0])]
        for name in unreachable:
            report.warnings.append(f"state {name!r} is unreachable")

    if p.states and not p.final_state_names:
        report.warnings.append("no final state: conversations cannot reach a natural conclusion")

    logger.debug(f"Validated {p.id}", extra={
        "protocol": str(p.id),
        "errors": len(report.errors),
        "warnings": len(report.warnings),
    })
    return report
