"""
Print a protocol FSM as Graphviz DOT or JSON.

    python manage.py render process-documents.acr --format dot | dot -Tsvg > pd.svg
"""
from django.core.management.base import BaseCommand

from cli.config import DOT, JSON, CliConfig, add_store_argument, command_error, io_error
from core.errors import AcreError
from protocols.imports import resolve_imports
from protocols.loader import read_protocol
from protocols.render import render_dot, render_json
from repository.store import load_store


class Command(BaseCommand):
    help = "Render a protocol as a DOT graph or a JSON document."

    def add_arguments(self, parser):
        parser.add_argument("path", help="Protocol file (.acr).")
        parser.add_argument("--format", choices=[DOT, JSON], default=DOT)
        add_store_argument(parser, "Protocol store used to resolve imports.")

    def handle(self, *args, **options):
        config = CliConfig.from_options(options, sources=[options["path"]])
        path = config.sources[0]
        try:
            p = read_protocol(path)
            if p.imports:
                # without --store an import can only fail, with a hint to pass one
                lookup = load_store(config.store_root) if config.store_given else {}
                p = resolve_imports(p, lookup)
        except OSError as e:
            raise io_error(path, e) from e
        except AcreError as e:
            raise command_error(e) from e

        text = render_json(p) if config.output_format == JSON else render_dot(p)
        self.stdout.write(text, ending="")
