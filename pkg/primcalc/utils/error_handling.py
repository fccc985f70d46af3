"""
Errors raised by primcalc, the exit code each one maps to, and the shared
"primcalc" logger.
"""

import logging
from functools import wraps
from typing import Any, Callable, Dict, Optional

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class PrimcalcError(Exception):
    """Base class for every error raised by primcalc."""

    exit_code = EXIT_INPUT


class InputError(PrimcalcError, ValueError):
    """Malformed input: DSL syntax, mismatched ranks, unknown names."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" if column is None else f"line {line}, column {column}"
            message = f"{message} ({where})"
        super().__init__(message)


class UnsupportedError(PrimcalcError):
    """The calculus declines to decide this situation."""

    exit_code = EXIT_UNSUPPORTED


class UnanalyzableError(PrimcalcError):
    """A vertex could not be certified for the class table."""

    def __init__(self, vertex: str, message: str = ""):
        self.vertex = vertex
        text = message or (
            f"vertex '{vertex}' is neither deterministic nor certified by "
            f"local periodicity search; supply a manual class table"
        )
        super().__init__(text)


class CheckFailure(PrimcalcError):
    """A report contained failing checks (strict mode)."""

    exit_code = EXIT_FAILED

    def __init__(self, report: Any):
        self.report = report
        super().__init__(f"check failed: {getattr(report, 'name', report)}")


class ErrorHandler:
    """Owns the primcalc logger and the listeners told about handled errors."""

    _logger: Optional[logging.Logger] = None
    _error_callbacks: Dict[str, Callable] = {}

    @classmethod
    def setup_logging(cls, log_file: Optional[str] = None,
                      level: int = logging.INFO) -> None:
        """
        (Re)install the handlers of the "primcalc" logger.

        Args:
            log_file: file receiving records at ``level``; None logs to the console only
            level: threshold for the file; the console never shows less than WARNING
        """
        log = logging.getLogger("primcalc")
        log.setLevel(level)
        for old in list(log.handlers):
            log.removeHandler(old)
            old.close()

        fmt = logging.Formatter(LOG_FORMAT)
        if log_file:
            to_file = logging.FileHandler(log_file, encoding="utf-8")
            to_file.setLevel(level)
            to_file.setFormatter(fmt)
            log.addHandler(to_file)

        to_console = logging.StreamHandler()
        to_console.setLevel(max(level, logging.WARNING))
        to_console.setFormatter(fmt)
        log.addHandler(to_console)
        cls._logger = log

    @classmethod
    def get_logger(cls) -> logging.Logger:
        if cls._logger is None:
            cls.setup_logging()
        return cls._logger

    @classmethod
    def log_error(cls, message: str, exception: Optional[Exception] = None) -> None:
        """ERROR line for ``message``; the traceback of ``exception`` goes to DEBUG."""
        log = cls.get_logger()
        if exception is None:
            log.error(message)
            return
        log.error("%s: %s", message, exception)
        log.debug("traceback", exc_info=exception)

    @classmethod
    def log_warning(cls, message: str) -> None:
        cls.get_logger().warning(message)

    @staticmethod
    def exit_code(exception: BaseException) -> int:
        """Process exit code of a command that stopped on ``exception``."""
        if isinstance(exception, PrimcalcError):
            return exception.exit_code
        if isinstance(exception, FileNotFoundError):
            return EXIT_INPUT
        raise exception

    @classmethod
    def handle_exception(cls, exception: Exception, context: str = "") -> None:
        """Log ``exception`` under ``context`` and pass it to every listener."""
        cls.log_error(f"{context} failed" if context else "failure", exception)
        for name, callback in list(cls._error_callbacks.items()):
            try:
                callback(exception, context)
            except Exception as broken:
                cls.log_error(f"error listener '{name}' raised", broken)

    @classmethod
    def register_error_callback(cls, name: str, callback: Callable) -> None:
        """``callback(exception, context)`` is called for every handled error."""
        cls._error_callbacks[name] = callback

    @classmethod
    def unregister_error_callback(cls, name: str) -> None:
        cls._error_callbacks.pop(name, None)

    @staticmethod
    def error_handler(context: str = "", default_return: Any = None,
                      reraise: bool = False):
        """Decorator routing exceptions of the wrapped call through handle_exception."""
        def decorator(func):
            where = context or f"{func.__module__}.{func.__name__}"

            @wraps(func)
            def wrapper(*args, **kwargs):
                try:
                    return func(*args, **kwargs)
                except Exception as exc:
                    ErrorHandler.handle_exception(exc, where)
                    if reraise:
                        raise
                    return default_return
            return wrapper
        return decorator

    @staticmethod
    def validate_range(value: float, min_val: float, max_val: float,
                       param_name: str) -> None:
        if not min_val <= value <= max_val:
            raise InputError(f"{param_name} = {value} is outside [{min_val}, {max_val}]")


def log_errors(func):
    """Log and re-raise."""
    return ErrorHandler.error_handler(reraise=True)(func)


def get_logger() -> logging.Logger:
    return ErrorHandler.get_logger()
