import logging

import pytest

from primcalc.models.report import Report
from primcalc.utils.error_handling import (EXIT_FAILED, EXIT_INPUT, EXIT_UNSUPPORTED, CheckFailure, ErrorHandler,
                                           InputError, PrimcalcError, UnanalyzableError, UnsupportedError,
                                           get_logger, log_errors)


def test_input_error_carries_location():
    err = InputError("cannot parse", 3, 7)
    assert (err.line, err.column) == (3, 7)
    assert str(err) == "cannot parse (line 3, column 7)"
    assert str(InputError("bad", 2)) == "bad (line 2)"
    assert isinstance(err, ValueError) and isinstance(err, PrimcalcError)


def test_other_errors():
    err = UnanalyzableError("u")
    assert err.vertex == "u" and "manual class table" in str(err)
    report = Report("periodicity v")
    assert CheckFailure(report).report is report
    assert "periodicity v" in str(CheckFailure(report))
    assert issubclass(UnsupportedError, PrimcalcError)


def test_setup_logging_is_idempotent(tmp_path):
    log_file = tmp_path / "run.log"
    ErrorHandler.setup_logging(str(log_file), logging.DEBUG)
    ErrorHandler.setup_logging(str(log_file), logging.DEBUG)
    logger = get_logger()
    assert logger.name == "primcalc"
    assert len(logger.handlers) == 2
    logger.debug("tails found")
    for handler in logger.handlers:
        handler.flush()
    assert "tails found" in log_file.read_text(encoding="utf-8")
    ErrorHandler.setup_logging(None, logging.WARNING)
    assert len(get_logger().handlers) == 1


def test_callbacks_see_handled_exceptions():
    seen = []
    ErrorHandler.register_error_callback("probe", lambda exc, ctx: seen.append((str(exc), ctx)))
    try:
        ErrorHandler.handle_exception(InputError("boom"), "parsing")
    finally:
        ErrorHandler.unregister_error_callback("probe")
    assert seen == [("boom", "parsing")]
    ErrorHandler.handle_exception(InputError("quiet"), "parsing")
    assert len(seen) == 1


def test_log_errors_reraises(caplog):
    @log_errors
    def explode():
        raise UnsupportedError("declined")

    with caplog.at_level(logging.ERROR, logger="primcalc"):
        with pytest.raises(UnsupportedError):
            explode()
    assert "declined" in caplog.text


def test_error_handler_default_return():
    @ErrorHandler.error_handler("division", default_return=-1)
    def divide(a, b):
        return a // b

    assert divide(6, 3) == 2
    assert divide(1, 0) == -1


def test_validate_range():
    ErrorHandler.validate_range(0.5, 0, 1, "tolerance")
    with pytest.raises(InputError):
        ErrorHandler.validate_range(2, 0, 1, "tolerance")


def test_exit_codes():
    assert ErrorHandler.exit_code(InputError("x")) == EXIT_INPUT
    assert ErrorHandler.exit_code(UnanalyzableError("u")) == EXIT_INPUT
    assert ErrorHandler.exit_code(FileNotFoundError("g.graph")) == EXIT_INPUT
    assert ErrorHandler.exit_code(UnsupportedError("x")) == EXIT_UNSUPPORTED
    assert ErrorHandler.exit_code(CheckFailure(Report("r"))) == EXIT_FAILED
    with pytest.raises(KeyError):
        ErrorHandler.exit_code(KeyError("not ours"))
