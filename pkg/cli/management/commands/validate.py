"""
Check protocol files against the protocol schema and the FSM rules.

    python manage.py validate process-documents.acr [--store DIR] [--format records]

Exit status is 1 when any file has an error; warnings alone do not fail.
"""
import logging

from django.core.management.base import BaseCommand, CommandError

from cli.config import FAILED, HUMAN, RECORDS, CliConfig, add_store_argument, command_error, io_error
from core.errors import AcreError, describe
from manager.records import record_line
from protocols.imports import resolve_imports
from protocols.loader import read_protocol
from protocols.validation import validate_protocol
from repository.store import load_store

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Validate protocol definitions (.acr files)."

    def add_arguments(self, parser):
        parser.add_argument("paths", nargs="+", help="Protocol files to check.")
        add_store_argument(parser, "Resolve imports against this protocol store before checking.")
        parser.add_argument("--format", choices=[HUMAN, RECORDS], default=HUMAN)

    def handle(self, *args, **options):
        config = CliConfig.from_options(options, sources=options["paths"])
        store = None
        if config.store_given:
            try:
                store = load_store(config.store_root)
            except OSError as e:
                raise io_error(config.store_root, e) from e
            except AcreError as e:
                raise command_error(e) from e

        failed = 0
        for path in config.sources:
            try:
                problems = self._check(path, store)
            except OSError as e:
                raise io_error(path, e) from e
            errors = [text for level, text in problems if level == "error"]
            failed += bool(errors)
            self._report(config, path, problems)

        logger.info(f"Validated {len(config.sources)} protocol file(s)", extra={
            "files": len(config.sources),
            "failed": failed,
        })
        if failed:
            raise CommandError(f"{failed} of {len(config.sources)} file(s) failed validation", returncode=FAILED)

    @staticmethod
    def _check(path, store):
        """(level, text) pairs for one file."""
        try:
            p = read_protocol(path)
            if store is not None and p.imports:
                p = resolve_imports(p, store)
        except AcreError as e:
            return [("error", describe(e))]
        report = validate_protocol(p)
        return [("error", e) for e in report.errors] + [("warning", w) for w in report.warnings]

    def _report(self, config, path, problems):
        if config.output_format == RECORDS:
            for level, text in problems:
                self.stdout.write(record_line("validate", path, level, text))
            if not problems:
                self.stdout.write(record_line("validate", path, "ok", ""))
            return
        for level, text in problems:
            style = self.style.ERROR if level == "error" else self.style.WARNING
            if level == "error" or config.verbosity >= 1:
                self.stdout.write(style(f"{path}: {level}: {text}"))
        if not any(level == "error" for level, _ in problems):
            self.stdout.write(self.style.SUCCESS(f"{path}: ok"))
