"""
Run a scenario through the simulation harness.

    python manage.py simulate harness/fixtures/scenarios/process-documents.scn
    python manage.py simulate vickrey-auction.scn --verify vickrey-auction.transcript
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from cli.config import FAILED, CliConfig, command_error, io_error
from core.errors import AcreError
from harness.runner import run_scenario, verify_transcript
from harness.scenario import read_scenario

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Simulate a multi-agent scenario and print or verify its transcript."

    def add_arguments(self, parser):
        parser.add_argument("scenario", help="Scenario file (.scn).")
        parser.add_argument("--seed", type=int, default=None, help="Override the scenario's seed.")
        parser.add_argument("--verify", default=None, help="Compare against this recorded transcript.")
        parser.add_argument("--output", default=None, help="Write the transcript here instead of stdout.")

    def handle(self, *args, **options):
        config = CliConfig.from_options(options, sources=[options["scenario"]], output_format="records")
        try:
            scenario = read_scenario(config.sources[0], seed=options["seed"])
            transcript = run_scenario(scenario)
        except AcreError as e:
            raise command_error(e) from e

        if options["verify"]:
            self._verify(transcript, Path(options["verify"]))
            return

        text = transcript.render()
        if options["output"]:
            try:
                Path(options["output"]).write_text(text, encoding="utf-8")
            except OSError as e:
                raise io_error(options["output"], e) from e
            if config.verbosity >= 1:
                self.stdout.write(self.style.SUCCESS(f"wrote {options['output']}"))
        else:
            self.stdout.write(text, ending="")

        if not transcript.quiescent:
            raise CommandError(
                f"scenario {scenario.name} still active after {transcript.ticks} cycle(s)",
                returncode=FAILED,
            )

    def _verify(self, transcript, golden: Path):
        try:
            expected = golden.read_text(encoding="utf-8")
        except OSError as e:
            raise io_error(golden, e) from e
        try:
            difference = verify_transcript(transcript, expected)
        except AcreError as e:
            raise command_error(e) from e
        if difference is not None:
            line_no, produced, wanted = difference
            logger.warning(f"Transcript differs from {golden}", extra={"line": line_no, "golden": str(golden)})
            raise CommandError(
                f"{golden}:{line_no}: expected {wanted!r}, produced {produced!r}",
                returncode=FAILED,
            )
        self.stdout.write(self.style.SUCCESS(f"{golden}: transcript matches"))
