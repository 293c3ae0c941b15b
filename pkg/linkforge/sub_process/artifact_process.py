"""This module is responsible for the JSON artifacts of a run: the polynomial and the trace."""

import json
from pathlib import Path

from linkforge import config
from linkforge.exceptions import ParseError
from linkforge.sub_process.assemble import MixedPoly

TRACE_KEYS = ("input", "word", "step1", "step2", "k", "m", "degree")


class ArtifactStore:
    """A proxy class for the output directory of a build."""
    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @property
    def polynomial_path(self) -> Path:
        """The path of the polynomial file."""
        return self.directory / config.POLYNOMIAL_FILE

    @property
    def trace_path(self) -> Path:
        """The path of the trace file."""
        return self.directory / config.TRACE_FILE

    def write_polynomial(self, f: MixedPoly) -> Path:
        """Write the polynomial in the interchange schema.

        Args:
            f: The polynomial.

        Returns:
            The path written to.
        """
        return write_json(self.polynomial_path, f.to_json())

    def write_trace(self, trace: dict) -> Path:
        """Write the trace of a build.

        Args:
            trace: The trace as a JSON compatible dict.

        Returns:
            The path written to.
        """
        return write_json(self.trace_path, trace)


def dumps(data: dict) -> str:
    """Serialize with a fixed layout so equal data gives equal text."""
    return json.dumps(data, indent=2) + "\n"


def write_json(path: Path, data: dict) -> Path:
    """Write a dict as JSON, creating the parent directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data), encoding="utf-8")
    return path


def read_json(path: Path) -> dict:
    """Read a JSON object from a file.

    Raises:
        ParseError: If the file is missing or does not hold a JSON object.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as error:
        raise ParseError(f"Could not read {path}: {error}") from error
    if not isinstance(data, dict):
        raise ParseError(f"{path} does not hold a JSON object.")
    return data


def read_polynomial(path: Path) -> MixedPoly:
    """Read a polynomial file.

    Raises:
        ParseError: If the file does not hold a polynomial.
    """
    return MixedPoly.from_json(read_json(path))


def read_trace(path: Path) -> dict:
    """Read a trace file.

    Raises:
        ParseError: If a required section is missing.
    """
    trace = read_json(path)
    missing = [key for key in TRACE_KEYS if key not in trace]
    if missing:
        raise ParseError(f"{path} is not a trace; missing {missing}.")
    for key in ("input", "word"):
        if not isinstance(trace[key], dict) or "braid" not in trace[key] or "strands" not in trace[key]:
            raise ParseError(f"{path} has no braid in its '{key}' section.")
    return trace
