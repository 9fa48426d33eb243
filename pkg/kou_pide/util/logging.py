import logging
from typing import Optional

LOG_FORMAT = '[%(asctime)s %(levelname)s] %(message)s'


def remove_log_handlers():
    """
    Detaches and closes all handlers currently attached to the root logger, such that consecutive runs in the same
    process do not write to the log files of previous runs.
    """
    root = logging.getLogger()
    for handler in root.handlers[:]:
        root.removeHandler(handler)
        handler.close()


def change_log_handler(log_file: Optional[str],
                       level: int = logging.WARN,
                       append: bool = False,
                       fmt: str = LOG_FORMAT,
                       console: bool = True):
    """
    Changes the root logger to log to the given file and, optionally, to the console. Previously attached handlers are
    removed.
    :param str log_file: the path to the intended log file. If `None`, no file handler is created.
    :param int level: the level of the log messages below which will be saved to file.
    :param bool append: whether to append to the log file, if it exists already.
    :param str fmt: the formatting string for the messages.
    :param bool console: whether to also log messages to the console.
    """
    remove_log_handlers()
    root = logging.getLogger()
    formatter = logging.Formatter(fmt)
    handlers = []
    if log_file is not None:
        handlers.append(logging.FileHandler(log_file, 'a' if append else 'w'))
    if console:
        handlers.append(logging.StreamHandler())
    for handler in handlers:
        handler.setFormatter(formatter)
        handler.setLevel(level)
        root.addHandler(handler)
    root.setLevel(level)
