"""This module defines any initial processes to run when a command starts."""

import logging
import os

from linkforge import config
from linkforge.connection import PipelineConnection

LOG_LEVELS = {
    "TRACE": logging.DEBUG,
    "INFO": logging.INFO,
    "ERROR": logging.ERROR,
}


def initialize(connection: PipelineConnection) -> None:
    """Configure logging from the environment.

    Args:
        connection: The connection of the running command.
    """
    level_name = os.environ.get(config.LOG_ENV_VAR, config.DEFAULT_LOG_LEVEL).upper()
    level = LOG_LEVELS.get(level_name, logging.INFO)

    if not connection.logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        connection.logger.addHandler(handler)
    connection.logger.setLevel(level)

    connection.log_trace(f"Log level set to {logging.getLevelName(level)}.")
