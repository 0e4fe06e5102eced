import pytest

from padic_rds import rds_logging as logging
from padic_rds.analysis import invariant_decomposition


@pytest.fixture
def log_file(tmp_path, monkeypatch):
    """Point the file handler at a temporary file and restore the default setup afterwards."""
    path = tmp_path / "padic_rds.log"
    monkeypatch.setenv('PADIC_RDS_LOG_FILE', str(path))
    yield path
    monkeypatch.delenv('PADIC_RDS_LOG_HANDLERS', raising=False)
    monkeypatch.delenv('PADIC_RDS_LOG_LEVEL', raising=False)
    monkeypatch.delenv('PADIC_RDS_LOG_FILE', raising=False)
    logging.setup_logging()


def test_logging_handlers_default(log_file, monkeypatch):
    """By default logs go to the console only and no file is created."""
    monkeypatch.delenv('PADIC_RDS_LOG_HANDLERS', raising=False)
    logging.setup_logging()
    logging.getLogger('test').info('This is a test message')
    assert not log_file.exists()
    assert logging.get_logging_config()['root']['handlers'] == ['console']


def test_logging_handlers_file(log_file, monkeypatch):
    """PADIC_RDS_LOG_HANDLERS='console,file' also writes to the log file."""
    monkeypatch.setenv('PADIC_RDS_LOG_HANDLERS', 'console,file')
    logging.setup_logging()
    test_message = 'This should be in the log file'
    logging.getLogger('test').info(test_message)
    assert test_message in log_file.read_text()


def test_logging_config_debug(log_file, monkeypatch):
    """DEBUG level lets the library's debug records through."""
    monkeypatch.setenv('PADIC_RDS_LOG_LEVEL', 'DEBUG')
    monkeypatch.setenv('PADIC_RDS_LOG_HANDLERS', 'console,file')
    logging.setup_logging()
    invariant_decomposition(29, (29, 2, 3))
    contents = log_file.read_text()
    assert '[DEBUG] padic_rds.analysis' in contents
    assert 'q = 7' in contents


def test_logging_config_info(log_file, monkeypatch):
    """INFO level filters debug records."""
    monkeypatch.setenv('PADIC_RDS_LOG_LEVEL', 'INFO')
    monkeypatch.setenv('PADIC_RDS_LOG_HANDLERS', 'console,file')
    logging.setup_logging()
    logger = logging.getLogger('test')
    logger.debug('This is a debug message')
    logger.info('This is an info message')
    contents = log_file.read_text()
    assert 'This is a debug message' not in contents
    assert 'This is an info message' in contents


def test_console_writes_to_stderr(log_file, monkeypatch, capsys):
    """Reports own stdout; log records must not end up there."""
    monkeypatch.delenv('PADIC_RDS_LOG_HANDLERS', raising=False)
    logging.setup_logging()
    logging.getLogger('test').warning('stderr only')
    captured = capsys.readouterr()
    assert 'stderr only' not in captured.out
