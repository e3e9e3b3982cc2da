# ---
# jupyter:
#   jupytext:
#     text_representation:
#       extension: .py
#       format_name: light
#       format_version: '1.5'
#       jupytext_version: 1.16.4
#   kernelspec:
#     display_name: Python (fixsplit-venv)
#     language: python
#     name: fixsplit-venv
# ---

import logging
import sys
from typing import Optional, TextIO, Union

from fixsplit.constants import DATE_FORMAT, LOG_FORMAT, LOG_LEVEL


# +

def setup_logging(level: Union[int, str] = LOG_LEVEL, stream: Optional[TextIO] = None) -> logging.Logger:
    """
    Configure the root logger with a single stream handler.

    Args:
        level: logging level as a number or a name such as 'DEBUG'
        stream: defaults to stdout

    Returns:
        the root logger
    """
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.getLevelName(LOG_LEVEL)

    logger = logging.getLogger()
    logger.setLevel(level)

    # one handler, even when main runs repeatedly in a session
    if logger.hasHandlers():
        logger.handlers.clear()

    handler = logging.StreamHandler(stream or sys.stdout)
    handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(handler)

    # sympy and numpy stay quiet unless asked for
    for name in ('sympy', 'numpy'):
        logging.getLogger(name).setLevel(max(level, logging.WARNING))

    logger.debug(f"logging at {logging.getLevelName(level)}")
    return logger
# -
