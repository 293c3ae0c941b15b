"""This module is the primary module of the command line. It collects the functionality of the rest of the framework."""

import sys

from linkforge import initialize
from linkforge import process
from linkforge.connection import PipelineConnection
from linkforge.exceptions import BusinessError, LinkforgeError, handle_error, log_exception

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_BUSINESS_ERROR = 2


def main(argv: list[str] | None = None) -> int:
    """The entry point of the command line.

    Args:
        argv: The arguments to run with. Defaults to sys.argv.

    Returns:
        The exit code: 0 on success, 1 on a construction or verification failure
        and 2 when the input breaks a business rule.
    """
    connection = PipelineConnection.create_connection_from_args(argv)
    sys.excepthook = log_exception(connection)

    initialize.initialize(connection)
    connection.log_trace("Linkforge started.")

    try:
        return process.process(connection)

    # Invalid input should stop the command without a construction diagnostic.
    except BusinessError as error:
        handle_error("Business Error", error, connection)
        return EXIT_BUSINESS_ERROR

    except LinkforgeError as error:
        handle_error("Process Error", error, connection)
        return EXIT_FAILURE


def run() -> None:
    """Run main and exit with its code."""
    sys.exit(main())
