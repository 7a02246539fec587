import logging
from strenum import StrEnum


class LogLevel(StrEnum):

    DEFAULT = 'default'
    VERBOSE = 'verbose'
    TRACE = 'trace'

    def to_logging_level(self) -> int:
        return {
            LogLevel.DEFAULT: logging.WARNING,
            LogLevel.VERBOSE: logging.INFO,
            LogLevel.TRACE: logging.DEBUG
        }[self]


def configure_logging(level: LogLevel = LogLevel.DEFAULT):
    # only the command line configures handlers, the library just logs
    logging.basicConfig(
        level=LogLevel(level).to_logging_level(),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )
