"""This module contains the connection object that carries the command line arguments and the logging of a run."""

import argparse
from dataclasses import dataclass
import logging
from pathlib import Path

from linkforge import config


@dataclass
class PipelineConnection:
    """The arguments of a single command together with the logger it reports through."""
    command: str
    arguments: argparse.Namespace
    logger: logging.Logger

    def log_trace(self, message: str) -> None:
        """Log a message at trace level."""
        self.logger.debug(message)

    def log_info(self, message: str) -> None:
        """Log a message at info level."""
        self.logger.info(message)

    def log_error(self, message: str) -> None:
        """Log a message at error level."""
        self.logger.error(message)

    @classmethod
    def create_connection_from_args(cls, argv: list[str] | None = None) -> "PipelineConnection":
        """Parse the command line into a connection.

        Args:
            argv: The arguments to parse. Defaults to sys.argv.

        Returns:
            The connection of the requested command.
        """
        arguments = build_parser().parse_args(argv)
        return cls(arguments.command, arguments, logging.getLogger(config.LOGGER_NAME))


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser of the four commands."""
    parser = argparse.ArgumentParser(
        prog="linkforge",
        description="Construct semiholomorphic polynomials with weakly isolated singularities from braid words.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build", help="Build f from a braid word and write the polynomial and trace.")
    _add_braid_arguments(build)
    build.add_argument("--out", type=Path, required=True, help="Directory the artifacts are written to.")
    _add_tracking_arguments(build)
    build.add_argument("--json", action="store_true", help="Print the polynomial JSON to stdout.")

    verify = commands.add_parser("verify", help="Verify a polynomial against a braid word.")
    verify.add_argument("--poly", type=Path, required=True, help="Polynomial JSON file.")
    _add_braid_arguments(verify)
    verify.add_argument("--out", type=Path, default=None, help="File the report is written to.")
    _add_tracking_arguments(verify)
    verify.add_argument("--json", action="store_true", help="Print the report JSON to stdout.")

    plot = commands.add_parser("plot", help="Render the diagrams of a trace as SVG files.")
    plot.add_argument("--trace", type=Path, required=True, help="Trace JSON file.")
    plot.add_argument("--out", type=Path, required=True, help="Directory the SVG files are written to.")

    dump = commands.add_parser("trace-dump", help="Print a summary of a trace.")
    dump.add_argument("--trace", type=Path, required=True, help="Trace JSON file.")
    dump.add_argument("--json", action="store_true", help="Print the trace JSON instead of a summary.")

    return parser


def _add_braid_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--braid", default="", help='Whitespace separated signed generators, e.g. "1 -2 1 -2".')
    parser.add_argument("--strands", type=int, required=True, help="Number of strands of the braid.")


def _add_tracking_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--radius-start", type=float, default=config.RADIUS_START, help="First torus radius of the verification.")
    parser.add_argument("--samples", type=int, default=config.DEFAULT_SAMPLES, help="Initial number of samples per torus.")
