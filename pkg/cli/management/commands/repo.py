"""
Repository commands.

    python manage.py repo list https://example.org/protocols
    python manage.py repo list --store ./acre-store
    python manage.py repo fetch https://example.org/protocols --store ./acre-store [--async]
"""
import json
import logging

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from cli.config import FAILED, HUMAN, JSON, USAGE, CliConfig, add_store_argument, command_error
from core.errors import AcreError
from repository.descriptor import parse_descriptor
from repository.fetch import descriptor_location, fetch_repository
from repository.store import load_store
from repository.tasks import fetch_repository_task
from repository.transport import DefaultTransport

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "List or fetch protocol repositories."

    def add_arguments(self, parser):
        actions = parser.add_subparsers(dest="action", metavar="{list,fetch}")

        listing = actions.add_parser("list", help="List the protocols a repository (or the store) offers.")
        listing.add_argument("source", nargs="?", help="Repository URL or directory; the store when omitted.")
        add_store_argument(listing)

        fetch = actions.add_parser("fetch", help="Download a repository into the protocol store.")
        fetch.add_argument("source", help="Repository URL or directory.")
        add_store_argument(fetch)
        fetch.add_argument("--format", choices=[HUMAN, JSON], default=HUMAN)
        fetch.add_argument(
            "--async",
            dest="run_async",
            action="store_true",
            default=None,
            help="Queue the fetch on the Celery worker (default: ACRE_FETCH_ASYNC).",
        )

    def handle(self, *args, **options):
        action = options.get("action")
        if action == "list":
            self._list(options)
        elif action == "fetch":
            self._fetch(options)
        else:
            raise CommandError("choose an action: list or fetch", returncode=USAGE)

    def _list(self, options):
        source = options.get("source")
        config = CliConfig.from_options(options, sources=[source] if source else [])
        try:
            if source:
                location = descriptor_location(source)
                entries = parse_descriptor(DefaultTransport().read(location), source=location).entries
            else:
                entries = load_store(config.store_root).ids()
        except AcreError as e:
            raise command_error(e) from e
        for pid in entries:
            self.stdout.write(f"{pid.namespace} {pid.name} {pid.version}")

    def _fetch(self, options):
        config = CliConfig.from_options(options, sources=[options["source"]])
        source = config.sources[0]
        run_async = options.get("run_async")
        if run_async is None:
            run_async = getattr(settings, "ACRE_FETCH_ASYNC", False)

        if run_async:
            task = fetch_repository_task.delay(source, str(config.store_root))
            logger.info(f"Queued fetch of {source}", extra={"source": source, "task_id": task.id})
            self.stdout.write(self.style.SUCCESS(f"queued fetch of {source} as task {task.id}"))
            return

        try:
            result = fetch_repository(source, load_store(config.store_root))
        except AcreError as e:
            raise command_error(e) from e

        if config.output_format == JSON:
            self.stdout.write(json.dumps(result.as_dict(), indent=2, sort_keys=True))
        else:
            for pid in result.added:
                self.stdout.write(f"added {pid}")
            for pid, reason in sorted(result.errors.items()):
                self.stdout.write(self.style.ERROR(f"failed {pid}: {reason}"))
            summary = f"{len(result.added)} added, {len(result.skipped)} unchanged, {len(result.errors)} failed"
            self.stdout.write(self.style.SUCCESS(summary) if result.ok else summary)
        if not result.ok:
            raise CommandError(f"{len(result.errors)} protocol(s) could not be fetched", returncode=FAILED)
