"""
Replay a recorded message trace through one agent's conversation manager.

    python manage.py trace --agent agent1 --store ./acre-store worked-example.trace
    python manage.py trace --agent agent1 --repository harness/fixtures/repository --snapshot worked-example.trace

Each trace entry is one manager cycle; the events of every cycle are
printed as records. ``--snapshot`` appends the manager's knowledge view.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from acl.traces import RECV, SEND, read_trace
from cli.config import FAILED, USAGE, CliConfig, add_store_argument, command_error, io_error
from core.errors import AcreError
from manager.engine import ConversationManager
from manager.records import event_lines, snapshot_lines
from repository.fetch import fetch_repository
from repository.store import ProtocolStore, load_store

logger = logging.getLogger(__name__)


class ReplayClock:
    """Starts at the given value and moves one second per replayed message."""

    def __init__(self, start: float = 0.0):
        self.now = start

    def __call__(self) -> float:
        return self.now


class Command(BaseCommand):
    help = "Replay a message trace from one agent's point of view and print event records."

    def add_arguments(self, parser):
        parser.add_argument("trace_file", help="Trace file, one message per line.")
        parser.add_argument("--agent", required=True, help="Agent whose manager replays the trace.")
        add_store_argument(parser)
        parser.add_argument("--repository", default=None, help="Load protocols from this repository instead of a store.")
        parser.add_argument("--clock", type=float, default=0.0, help="Clock value of the first cycle.")
        parser.add_argument("--snapshot", action="store_true", help="Print the knowledge view after the last cycle.")

    def handle(self, *args, **options):
        config = CliConfig.from_options(options, sources=[options["trace_file"]], output_format="records")
        if options["repository"] and config.store_given:
            raise CommandError("--store and --repository are mutually exclusive", returncode=USAGE)
        agent = options["agent"]

        try:
            entries = read_trace(config.sources[0])
        except OSError as e:
            raise io_error(config.sources[0], e) from e
        except AcreError as e:
            raise command_error(e) from e

        protocols = self._protocols(config, options["repository"])
        clock = ReplayClock(options["clock"])
        manager = ConversationManager(agent, protocols, clock=clock)

        lines = []
        for entry in entries:
            m = entry.message
            if not m.involves(agent):
                raise CommandError(f"line {entry.line_no}: message does not involve {agent}", returncode=FAILED)
            expected = SEND if m.sender == agent else RECV
            if entry.direction and entry.direction != expected:
                raise CommandError(
                    f"line {entry.line_no}: marked {entry.direction} but {agent} is the "
                    f"{'sender' if expected == SEND else 'receiver'}",
                    returncode=FAILED,
                )
            manager.submit(m)
            events = manager.run_cycle()
            lines.extend(event_lines(manager.cycle, events))
            clock.now += 1

        if options["snapshot"]:
            lines.extend(snapshot_lines(manager.snapshot()))
        manager.close()

        logger.info(f"Replayed {len(entries)} message(s) for {agent}", extra={
            "agent": agent,
            "messages": len(entries),
            "records": len(lines),
        })
        for line in lines:
            self.stdout.write(line)

    @staticmethod
    def _protocols(config, repository):
        try:
            if repository:
                store = ProtocolStore.in_memory()
                result = fetch_repository(repository, store)
                if not result.ok:
                    failures = "; ".join(f"{pid}: {reason}" for pid, reason in sorted(result.errors.items()))
                    raise CommandError(f"repository could not be loaded: {failures}", returncode=FAILED)
                return store
            return load_store(config.store_root)
        except AcreError as e:
            raise command_error(e) from e
