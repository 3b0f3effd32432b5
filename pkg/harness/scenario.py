"""
Scenario files for the simulation harness.

A scenario is plain text, one declaration per line; ``#`` starts a comment:

    name: process-documents
    seed: 42
    protocols: repository            # repository directory, relative to this file
    max-cycles: 20
    clock: start=1000 step=1
    agent: agent1
    agent: agent2
    rule agent1: boot -> start_and_send is.lill.examples/process-documents/1.0 agent2 inform ready
    rule agent2: advanced state=waiting direction=received -> advance $cid request process(doc123)

A rule names the agent whose events it watches, a trigger (an event kind,
or ``boot`` for the first tick), optional ``key=value`` conditions on the
event payload, and one or more actions separated by ``;``. Action arguments
may use ``$cid``, ``$state``, ``$length``, ``$other``, ``$group``,
``$monitor``, ``$tick``, any variable bound in the conversation, and
``$choice(a|b|...)`` for a seeded random pick.

The parsed declarations are checked against a JSON schema before use.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from django.conf import settings
from jsonschema import Draft202012Validator

from core.errors import AcreError
from manager.events import EventKind

logger = logging.getLogger(__name__)

BOOT = "boot"
TRIGGERS = [BOOT] + [kind.value for kind in EventKind]

# action -> (fewest, most) arguments; None means no upper bound
ACTIONS: Dict[str, Tuple[int, Optional[int]]] = {
    "start": (2, 2),
    "start_and_send": (3, 4),
    "advance": (2, 3),
    "cancel": (1, 1),
    "confirm_cancel": (1, 1),
    "deny_cancel": (1, 1),
    "not_understood": (0, 0),
    "set_timeout": (2, 2),
    "annotate": (2, 2),
    "deannotate": (1, 2),
    "archive": (1, 1),
    "recall": (1, 1),
    "forget": (1, 1),
    "agent_group": (1, None),
    "start_group": (2, 4),
    "advance_all": (2, 3),
    "remove": (2, 2),
    "watch": (2, None),
    "unwatch": (1, None),
    "group_timeout": (2, 2),
    "annotate_group": (2, 2),
}

SCENARIO_JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["name", "seed", "protocols", "max-cycles", "clock", "agents", "rules"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "seed": {"type": "integer"},
        "protocols": {"type": "string", "minLength": 1},
        "max-cycles": {"type": "integer", "minimum": 1},
        "clock": {
            "type": "object",
            "required": ["start", "step"],
            "additionalProperties": False,
            "properties": {
                "start": {"type": "number"},
                "step": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "agents": {
            "type": "array",
            "minItems": 1,
            "uniqueItems": True,
            "items": {"type": "string", "pattern": r"^[A-Za-z0-9_.\-]+$"},
        },
        "rules": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["agent", "trigger", "when", "actions"],
                "additionalProperties": False,
                "properties": {
                    "agent": {"type": "string"},
                    "trigger": {"enum": TRIGGERS},
                    "when": {"type": "object", "additionalProperties": {"type": "string"}},
                    "actions": {
                        "type": "array",
                        "minItems": 1,
                        "items": {
                            "type": "object",
                            "required": ["action", "args"],
                            "additionalProperties": False,
                            "properties": {
                                "action": {"enum": sorted(ACTIONS)},
                                "args": {"type": "array", "items": {"type": "string"}},
                            },
                        },
                    },
                },
            },
        },
    },
}

_validator = Draft202012Validator(SCENARIO_JSON_SCHEMA)

DEFAULTS = {"max-cycles": 50, "clock": {"start": 0, "step": 1}}


class ScenarioInvalid(AcreError):
    def __init__(self, message: str, source: str = ""):
        super().__init__(f"{source}: {message}" if source else message, "SCENARIO_INVALID")
        self.source = source


class UnknownAgent(AcreError):
    def __init__(self, agent: str, where: str = ""):
        super().__init__(f"{where}unknown agent {agent!r}", "UNKNOWN_AGENT")
        self.agent = agent


@dataclass(frozen=True)
class Action:
    name: str
    args: Tuple[str, ...] = ()

    def __str__(self) -> str:
        return " ".join((self.name,) + self.args)


@dataclass(frozen=True)
class Rule:
    agent: str
    trigger: str
    conditions: Tuple[Tuple[str, str], ...] = ()
    actions: Tuple[Action, ...] = ()
    line_no: int = 0


@dataclass(frozen=True)
class ClockSchedule:
    start: float = 0
    step: float = 1

    def at(self, tick: int) -> float:
        return self.start + max(tick - 1, 0) * self.step


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    protocols: Path
    agents: Tuple[str, ...]
    rules: Tuple[Rule, ...] = ()
    max_cycles: int = 50
    clock: ClockSchedule = field(default_factory=ClockSchedule)
    source: str = ""

    def rules_for(self, agent: str) -> List[Rule]:
        return [r for r in self.rules if r.agent == agent]


def _number(text: str) -> Union[int, float, str]:
    # leave anything unparseable as text so the schema reports it
    for convert in (int, float):
        try:
            return convert(text)
        except ValueError:
            continue
    return text


def _clock(text: str, line_no: int, source: str) -> dict:
    clock = dict(DEFAULTS["clock"])
    for part in text.split():
        key, sep, value = part.partition("=")
        if not sep or key not in clock:
            raise ScenarioInvalid(f"line {line_no}: expected start=N step=N, got {part!r}", source)
        clock[key] = _number(value)
    return clock


def _rule(text: str, line_no: int, source: str) -> dict:
    head, sep, body = text.partition(":")
    agent = head[len("rule"):].strip()
    if not sep or not agent:
        raise ScenarioInvalid(f"line {line_no}: expected 'rule <agent>: ...'", source)
    when_text, arrow, actions_text = body.partition("->")
    if not arrow:
        raise ScenarioInvalid(f"line {line_no}: rule has no '->'", source)
    tokens = when_text.split()
    if not tokens:
        raise ScenarioInvalid(f"line {line_no}: rule has no trigger", source)
    when = {}
    for token in tokens[1:]:
        key, eq, value = token.partition("=")
        if not eq or not key:
            raise ScenarioInvalid(f"line {line_no}: condition {token!r} is not key=value", source)
        when[key] = value
    actions = []
    for chunk in actions_text.split(";"):
        words = chunk.split()
        if words:
            actions.append({"action": words[0], "args": words[1:]})
    return {"agent": agent, "trigger": tokens[0], "when": when, "actions": actions, "line": line_no}


def scenario_document(text: str, source: str = "") -> dict:
    """Declarations of a scenario file as a plain dict, before validation."""
    document = {"agents": [], "rules": []}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("rule ") or line.startswith("rule\t"):
            document["rules"].append(_rule(line, line_no, source))
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if not sep:
            raise ScenarioInvalid(f"line {line_no}: expected 'key: value', got {line!r}", source)
        if key == "agent":
            document["agents"].append(value)
        elif key == "clock":
            document["clock"] = _clock(value, line_no, source)
        elif key in ("seed", "max-cycles"):
            document[key] = _number(value)
        elif key in ("name", "protocols"):
            document[key] = value
        else:
            raise ScenarioInvalid(f"line {line_no}: unknown key {key!r}", source)
    return document


def _check(document: dict, source: str) -> None:
    lines = [r.pop("line") for r in document["rules"]]
    errors = sorted(_validator.iter_errors(document), key=lambda e: list(e.path))
    if errors:
        details = "; ".join(
            f"{'/'.join(str(p) for p in e.path) or '(root)'}: {e.message}" for e in errors[:5]
        )
        raise ScenarioInvalid(details, source)

    agents = set(document["agents"])
    for line_no, rule in zip(lines, document["rules"]):
        where = f"line {line_no}: "
        if rule["agent"] not in agents:
            raise UnknownAgent(rule["agent"], where)
        for action in rule["actions"]:
            fewest, most = ACTIONS[action["action"]]
            count = len(action["args"])
            if count < fewest or (most is not None and count > most):
                raise ScenarioInvalid(f"{where}{action['action']} takes {fewest}-{most or 'n'} arguments", source)
            literal_agents = []
            if action["action"] in ("start", "start_and_send"):
                literal_agents = action["args"][1:2]
            elif action["action"] == "agent_group":
                literal_agents = action["args"][1:]
            for name in literal_agents:
                if "$" not in name and name not in agents:
                    raise UnknownAgent(name, where)
        rule["line"] = line_no


def parse_scenario(text: str, base_dir: Union[str, Path, None] = None, source: str = "", seed: Optional[int] = None) -> Scenario:
    """Parse and check a scenario; ``seed`` overrides the file's seed."""
    document = scenario_document(text, source)
    document.setdefault("seed", getattr(settings, "ACRE_DEFAULT_SEED", 0))
    document.setdefault("max-cycles", DEFAULTS["max-cycles"])
    document.setdefault("clock", dict(DEFAULTS["clock"]))
    if seed is not None:
        document["seed"] = seed
    _check(document, source)

    protocols = Path(document["protocols"])
    if not protocols.is_absolute() and base_dir is not None:
        protocols = Path(base_dir) / protocols
    rules = tuple(
        Rule(
            agent=r["agent"],
            trigger=r["trigger"],
            conditions=tuple(r["when"].items()),
            actions=tuple(Action(a["action"], tuple(a["args"])) for a in r["actions"]),
            line_no=r["line"],
        )
        for r in document["rules"]
    )
    scenario = Scenario(
        name=document["name"],
        seed=document["seed"],
        protocols=protocols,
        agents=tuple(document["agents"]),
        rules=rules,
        max_cycles=document["max-cycles"],
        clock=ClockSchedule(**document["clock"]),
        source=source,
    )
    logger.debug(f"Parsed scenario {scenario.name}", extra={"agents": len(scenario.agents), "rules": len(rules)})
    return scenario


def read_scenario(path: Union[str, Path], seed: Optional[int] = None) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioInvalid(f"cannot read scenario: {e}", str(path)) from e
    return parse_scenario(text, base_dir=path.parent, source=str(path), seed=seed)
