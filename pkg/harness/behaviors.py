"""
Scripted agent behaviour: scenario rules turned into manager operations.
"""
import logging
import random
import re
from typing import Dict, List, Optional, Tuple

from core.errors import AcreError
from groups.reasoner import GroupReasoner
from manager.engine import ConversationManager, UnknownConversation
from manager.events import Event, EventKind
from manager.records import record_line

from .scenario import BOOT, Rule, ScenarioInvalid

logger = logging.getLogger(__name__)

_VARIABLE_RE = re.compile(r"\$(?:choice\(([^)]*)\)|([A-Za-z_][\w\-]*))")


class ScriptedBehavior:
    """Reacts to one agent's events by running the actions of matching rules, in rule order."""

    def __init__(self, rules: List[Rule], manager: ConversationManager, groups: GroupReasoner, rng: random.Random):
        self.rules = list(rules)
        self.manager = manager
        self.groups = groups
        self.rng = rng
        self.last_group: Optional[str] = None
        # problems raised by actions, as transcript records
        self.errors: List[str] = []

    @property
    def agent(self) -> str:
        return self.manager.agent_name

    def react(self, events: List[Event], tick: int, boot: bool = False) -> int:
        """Run every matching rule; returns how many fired."""
        fired = 0
        if boot:
            for rule in self.rules:
                if rule.trigger == BOOT:
                    self._fire(rule, None, tick)
                    fired += 1
        for e in events:
            for rule in self.rules:
                if self.matches(rule, e):
                    self._fire(rule, e, tick)
                    fired += 1
        return fired

    @staticmethod
    def matches(rule: Rule, e: Event) -> bool:
        if rule.trigger != e.kind.value:
            return False
        for key, value in rule.conditions:
            actual = e.subject if key == "subject" else e.get(key)
            if actual != value:
                return False
        return True

    def _context(self, e: Optional[Event], tick: int) -> Dict[str, str]:
        context = {"tick": str(tick)}
        if self.last_group is not None:
            context["group"] = self.last_group
        if e is None:
            return context
        if e.kind is EventKind.GROUP_EVENT:
            context["group"] = e.subject
        else:
            try:
                c = self.manager.conversation(e.subject)
            except UnknownConversation:
                c = None
            if c is not None:
                context.update((name, str(value)) for name, value in c.bindings.items())
                context.update(cid=c.cid, state=c.current_state, length=str(c.length), other=c.other_party(self.agent))
        # the event's own payload describes the moment it was raised
        context.update((k.replace("-", "_"), v) for k, v in e.payload)
        return context

    def _substitute(self, arg: str, context: Dict[str, str], rule: Rule) -> str:
        def replace(match):
            options, name = match.groups()
            if options is not None:
                return self.rng.choice(options.split("|"))
            if name not in context:
                raise ScenarioInvalid(f"line {rule.line_no}: ${name} has no value here")
            return context[name]

        return _VARIABLE_RE.sub(replace, arg)

    def _fire(self, rule: Rule, e: Optional[Event], tick: int) -> None:
        for action in rule.actions:
            # earlier actions may have started a group
            context = self._context(e, tick)
            args = tuple(self._substitute(a, context, rule) for a in action.args)
            try:
                self._run(action.name, args, e)
            except ScenarioInvalid:
                raise
            except (AcreError, ValueError) as error:
                code = getattr(error, "error_code", "INVALID_ARGUMENT")
                logger.warning(f"{self.agent}: {action} failed: {error}", extra={
                    "agent": self.agent,
                    "tick": tick,
                    "error_code": code,
                })
                self.errors.append(record_line(tick, "error", action.name, code, str(error)))

    def _run(self, name: str, args: Tuple[str, ...], e: Optional[Event]) -> None:
        manager, groups = self.manager, self.groups
        if name == "start":
            manager.start_conversation(args[0], args[1])
        elif name == "start_and_send":
            manager.start_and_send(*args)
        elif name == "advance":
            manager.advance_conversation(*args)
        elif name == "cancel":
            manager.cancel(args[0])
        elif name == "confirm_cancel":
            manager.confirm_cancel(args[0])
        elif name == "deny_cancel":
            manager.deny_cancel(args[0])
        elif name == "not_understood":
            if e is not None and e.message is not None:
                manager.send_not_understood(e.message)
        elif name == "set_timeout":
            manager.set_timeout(args[0], float(args[1]))
        elif name == "annotate":
            manager.annotate(args[0], args[1])
        elif name == "deannotate":
            manager.deannotate(*args)
        elif name == "archive":
            manager.archive(args[0])
        elif name == "recall":
            manager.recall(args[0])
        elif name == "forget":
            manager.forget(args[0])
        elif name == "agent_group":
            groups.new_agent_group(args[0], args[1:])
        elif name == "start_group":
            self.last_group = groups.start_group(*args)
        elif name == "advance_all":
            groups.advance_all(*args)
        elif name == "remove":
            groups.remove(args[0], args[1])
        elif name == "watch":
            groups.watch(args[0], args[1:])
        elif name == "unwatch":
            groups.unwatch(args[0], args[1:] or None)
        elif name == "group_timeout":
            groups.set_timeout(args[0], float(args[1]))
        elif name == "annotate_group":
            groups.annotate(args[0], args[1])
        else:
            raise ScenarioInvalid(f"unknown action {name!r}")
