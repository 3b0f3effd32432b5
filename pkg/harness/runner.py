"""
Deterministic multi-agent simulation.

Every tick the runner delivers the messages sent during the previous tick,
runs each agent's manager cycle in name order and lets the agent's script
react to the cycle's events. The run stops at quiescence (nothing sent,
nothing queued, no rule fired) or after the scenario's cycle limit.

The transcript is plain text:

    # seed: <seed>
    # scenario: <name>
    [messages]
    # tick <n>
    <message in trace format>
    [events]
    <agent>\t<event record>
    [snapshots]
    <agent>\t<snapshot record>
    # ticks: <n>
    # quiescent: yes|no

The messages section reads back as a trace.
"""
import logging
import random
import re
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from acl.codec import serialize_message
from acl.messages import Message
from core.errors import AcreError
from groups.reasoner import GroupReasoner
from manager.engine import ConversationManager
from manager.records import event_lines, snapshot_lines
from protocols.definitions import Protocol
from protocols.identifiers import ProtocolId
from repository.fetch import fetch_repository
from repository.store import ProtocolStore

from .behaviors import ScriptedBehavior
from .scenario import Scenario, ScenarioInvalid, UnknownAgent

logger = logging.getLogger(__name__)

_SEED_RE = re.compile(r"^# seed: (-?\d+)$", re.MULTILINE)


class SeedMismatch(AcreError):
    def __init__(self, expected: Optional[int], actual: int):
        super().__init__(f"transcript was recorded with seed {expected}, this run uses {actual}", "SEED_MISMATCH")
        self.expected = expected
        self.actual = actual


class SimulationClock:
    """Shared by all managers of a run; reads the scenario's schedule at the current tick."""

    def __init__(self, scenario: Scenario):
        self.schedule = scenario.clock
        self.tick = 0

    def __call__(self) -> float:
        return self.schedule.at(self.tick)


@dataclass
class Transcript:
    scenario: str
    seed: int
    messages: List[Tuple[int, Message]] = field(default_factory=list)
    events: List[str] = field(default_factory=list)
    snapshots: List[str] = field(default_factory=list)
    ticks: int = 0
    quiescent: bool = False

    def render(self) -> str:
        lines = [f"# seed: {self.seed}", f"# scenario: {self.scenario}", "[messages]"]
        current = None
        for tick, m in self.messages:
            if tick != current:
                lines.append(f"# tick {tick}")
                current = tick
            lines.append(serialize_message(m))
        lines.append("[events]")
        lines.extend(self.events)
        lines.append("[snapshots]")
        lines.extend(self.snapshots)
        lines.append(f"# ticks: {self.ticks}")
        lines.append(f"# quiescent: {'yes' if self.quiescent else 'no'}")
        return "\n".join(lines) + "\n"


def transcript_seed(text: str) -> Optional[int]:
    match = _SEED_RE.search(text)
    return int(match.group(1)) if match else None


def first_difference(produced: str, expected: str) -> Optional[Tuple[int, str, str]]:
    """(line number, produced line, expected line) of the first mismatch, or None when equal."""
    if produced == expected:
        return None
    ours, theirs = produced.splitlines(), expected.splitlines()
    for line_no in range(1, max(len(ours), len(theirs)) + 2):
        a = ours[line_no - 1] if line_no <= len(ours) else "<end of transcript>"
        b = theirs[line_no - 1] if line_no <= len(theirs) else "<end of transcript>"
        if a != b:
            return line_no, a, b
    # only trailing newlines differ
    return len(ours) + 1, "<end of transcript>", "<end of transcript>"


def verify_transcript(transcript: Transcript, expected: str) -> Optional[Tuple[int, str, str]]:
    recorded = transcript_seed(expected)
    if recorded != transcript.seed:
        raise SeedMismatch(recorded, transcript.seed)
    return first_difference(transcript.render(), expected)


def load_protocols(scenario: Scenario) -> ProtocolStore:
    store = ProtocolStore.in_memory()
    try:
        result = fetch_repository(str(scenario.protocols), store, workers=1)
    except AcreError as e:
        raise ScenarioInvalid(f"protocols could not be loaded: {e}", scenario.source) from e
    if not result.ok:
        failures = ", ".join(f"{pid}: {reason}" for pid, reason in sorted(result.errors.items()))
        raise ScenarioInvalid(f"protocols could not be loaded ({failures})", scenario.source)
    return store


class Simulation:
    def __init__(self, scenario: Scenario, protocols: Optional[Mapping[ProtocolId, Protocol]] = None):
        self.scenario = scenario
        self.protocols = protocols if protocols is not None else load_protocols(scenario)
        self.clock = SimulationClock(scenario)
        self.rng = random.Random(scenario.seed)
        self.managers: Dict[str, ConversationManager] = {}
        self.groups: Dict[str, GroupReasoner] = {}
        self.behaviors: Dict[str, ScriptedBehavior] = {}
        for name in sorted(scenario.agents):
            manager = ConversationManager(name, self.protocols, clock=self.clock)
            self.managers[name] = manager
            self.groups[name] = GroupReasoner(manager)
            self.behaviors[name] = ScriptedBehavior(scenario.rules_for(name), manager, self.groups[name], self.rng)

    def _deliver(self, m: Message) -> None:
        manager = self.managers.get(m.receiver)
        if manager is None:
            raise UnknownAgent(m.receiver, f"message from {m.sender}: ")
        manager.submit(m)

    def run(self) -> Transcript:
        transcript = Transcript(self.scenario.name, self.scenario.seed)
        pending: List[Message] = []
        for tick in range(1, self.scenario.max_cycles + 1):
            self.clock.tick = tick
            transcript.ticks = tick
            for m in pending:
                self._deliver(m)
            pending = []

            fired = 0
            for name, manager in self.managers.items():
                behavior = self.behaviors[name]
                events = manager.run_cycle()
                transcript.events.extend(f"{name}\t{line}" for line in event_lines(tick, events))
                fired += behavior.react(events, tick, boot=tick == 1)
                transcript.events.extend(f"{name}\t{line}" for line in behavior.errors)
                behavior.errors.clear()

            for manager in self.managers.values():
                for m in manager.drain_outbox():
                    transcript.messages.append((tick, m))
                    pending.append(m)

            if not pending and not fired and not any(m.pending for m in self.managers.values()):
                transcript.quiescent = True
                break

        for name, manager in self.managers.items():
            lines = snapshot_lines(manager.snapshot()) + self.groups[name].record_lines()
            transcript.snapshots.extend(f"{name}\t{line}" for line in lines)

        log = logger.info if transcript.quiescent else logger.warning
        log(f"Scenario {self.scenario.name} stopped after {transcript.ticks} tick(s)", extra={
            "scenario": self.scenario.name,
            "seed": self.scenario.seed,
            "quiescent": transcript.quiescent,
            "messages": len(transcript.messages),
        })
        return transcript


def run_scenario(scenario: Scenario, protocols: Optional[Mapping[ProtocolId, Protocol]] = None) -> Transcript:
    return Simulation(scenario, protocols).run()
