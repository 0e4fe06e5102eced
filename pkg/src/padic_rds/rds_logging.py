"""
Logging configuration for padic-rds.

Environment Variables:
    PADIC_RDS_LOG_LEVEL: Set the logging level (e.g., 'DEBUG', 'INFO'). Defaults to 'INFO'.
    PADIC_RDS_LOG_HANDLERS: Set logging handlers. Options:
        - Not set or 'console': Log to stderr only (default)
        - 'console,file': Log to both stderr and file
    PADIC_RDS_LOG_FILE: Path of the log file used by the 'file' handler.
        Defaults to 'padic_rds.log'.

Console output goes to stderr because the CLI writes reports to stdout.

Example:
    To enable both console and file logging:
    $ export PADIC_RDS_LOG_HANDLERS='console,file'

    To set debug level logging:
    $ export PADIC_RDS_LOG_LEVEL='DEBUG'
"""

import logging
import logging.config
import os
from logging.config import dictConfig

DEFAULT_LOG_FILE = 'padic_rds.log'


def get_logging_config():
    """Get the logging configuration based on current environment variables."""
    level = os.getenv('PADIC_RDS_LOG_LEVEL', 'INFO')
    handlers = [h.strip() for h in os.getenv('PADIC_RDS_LOG_HANDLERS', 'console').split(',') if h.strip()]

    handler_defs = {
        'console': {
            'class': 'logging.StreamHandler',
            'level': level,
            'formatter': 'detailed',
            'stream': 'ext://sys.stderr'
        }
    }
    # the file handler opens its file eagerly, so only declare it when asked for
    if 'file' in handlers:
        handler_defs['file'] = {
            'class': 'logging.FileHandler',
            'level': level,
            'formatter': 'detailed',
            'filename': os.getenv('PADIC_RDS_LOG_FILE', DEFAULT_LOG_FILE),
            'mode': 'a'
        }

    return {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'detailed': {
                'format': '%(asctime)s [%(levelname)s] %(name)s:%(lineno)d - %(message)s'
            }
        },
        'handlers': handler_defs,
        'root': {
            'level': level,
            'handlers': [h for h in handlers if h in handler_defs]
        }
    }


def setup_logging():
    """Setup logging with current configuration."""
    config = get_logging_config()
    dictConfig(config)
    logging.getLogger(__name__).debug(f"Logging level: {config['root']['level']}, "
                                      f"handlers: {config['root']['handlers']}")


# Apply configuration when module is imported
setup_logging()

# Re-export what the package uses from logging
CRITICAL = logging.CRITICAL
ERROR = logging.ERROR
WARNING = logging.WARNING
INFO = logging.INFO
DEBUG = logging.DEBUG

getLogger = logging.getLogger
Logger = logging.Logger
