import logging

from fin_inverse.infra.logging.logger import attach_run_log, detach_run_log, get_logger


def test_get_logger_is_idempotent():
    root = get_logger()
    handlers = list(root.handlers)
    assert get_logger() is root
    assert root.handlers == handlers
    assert root.propagate is False


def test_child_records_reach_the_run_log(temp_dir):
    path = temp_dir / "run.log"
    handler = attach_run_log(path)
    try:
        get_logger("fin_inverse.test").info("hello from a child logger")
    finally:
        detach_run_log(handler)
    assert "hello from a child logger" in path.read_text()
    assert handler not in logging.getLogger("fin_inverse").handlers
