"""Centralized structured logging for simulator components."""
import logging
import sys
import time
from contextlib import contextmanager
from functools import wraps
from typing import Dict, Optional


class StructuredFormatter(logging.Formatter):
    """Formatter that fills defaults for the structured context fields."""

    def format(self, record):
        """Format log record with additional context."""
        if not hasattr(record, 'component'):
            record.component = 'unknown'
        if not hasattr(record, 'operation'):
            record.operation = 'unknown'
        if not hasattr(record, 'duration_ms'):
            record.duration_ms = 0
        if not hasattr(record, 'status'):
            record.status = 'unknown'

        return super().format(record)


class SimLogger:
    """Process-wide logger registry for the simulator."""

    _instance = None
    _loggers: Dict[str, logging.Logger] = {}

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(SimLogger, cls).__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        """Initialize the simulator logger."""
        if self._initialized:
            return

        self.level: int = logging.INFO
        self._initialized = True

        self._setup_root_logger()

    def _setup_root_logger(self):
        """Configure the root logger with console output on stderr."""
        root_logger = logging.getLogger()
        root_logger.setLevel(self.level)

        if not root_logger.handlers:
            console_handler = logging.StreamHandler(sys.stderr)

            formatter = StructuredFormatter(
                fmt='%(asctime)s - %(name)s - %(levelname)s - [%(component)s] [%(operation)s] '
                    '%(message)s - duration=%(duration_ms)dms status=%(status)s',
                datefmt='%Y-%m-%d %H:%M:%S'
            )
            console_handler.setFormatter(formatter)
            root_logger.addHandler(console_handler)

    def set_level(self, level: str):
        """
        Change the root log level.

        Args:
            level: Level name such as ``DEBUG`` or ``WARNING``
        """
        resolved: Optional[int] = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            logging.warning(f"Unknown log level '{level}', keeping {logging.getLevelName(self.level)}")
            return
        self.level = resolved
        logging.getLogger().setLevel(resolved)

    def get_logger(self, name: str, component: str = 'simulator') -> logging.Logger:
        """
        Get a logger instance for a specific component.

        Args:
            name: Logger name (usually module name)
            component: Component name for context

        Returns:
            Configured logger instance
        """
        if name not in self._loggers:
            logger = logging.getLogger(name)
            logger.component = component
            self._loggers[name] = logger

        return self._loggers[name]

    @contextmanager
    def log_operation(
        self,
        logger: logging.Logger,
        operation: str,
        component: str,
        **kwargs
    ):
        """
        Context manager for logging operations with wall-clock duration.

        Args:
            logger: Logger instance
            operation: Operation name
            component: Component name
            **kwargs: Additional context to log

        Example:
            with sim_logger.log_operation(logger, 'run', 'simulation', seed=1):
                simulation.run()
        """
        start_time = time.perf_counter()
        extra = {
            'component': component,
            'operation': operation,
            'duration_ms': 0,
            'status': 'started',
            **kwargs
        }

        logger.info(f"Starting {operation}", extra=extra)

        try:
            yield
            extra['duration_ms'] = int((time.perf_counter() - start_time) * 1000)
            extra['status'] = 'success'
            logger.info(f"Completed {operation}", extra=extra)

        except Exception as e:
            extra['duration_ms'] = int((time.perf_counter() - start_time) * 1000)
            extra['status'] = 'error'
            extra['error'] = str(e)
            extra['error_type'] = type(e).__name__
            logger.error(f"Failed {operation}: {str(e)}", extra=extra, exc_info=True)
            raise

    def log_metric(
        self,
        logger: logging.Logger,
        metric_name: str,
        value: float,
        component: str,
        **tags
    ):
        """
        Log a metric value.

        Args:
            logger: Logger instance
            metric_name: Name of the metric
            value: Metric value
            component: Component name
            **tags: Additional tags for the metric
        """
        extra = {
            'component': component,
            'operation': 'metric',
            'metric_name': metric_name,
            'metric_value': value,
            'duration_ms': 0,
            'status': 'success',
            **tags
        }
        logger.info(f"Metric: {metric_name}={value}", extra=extra)


def log_sim_operation(component: str, operation: str):
    """
    Decorator wrapping a callable in ``SimLogger.log_operation``.

    Args:
        component: Component name
        operation: Operation name

    Example:
        @log_sim_operation('sweep', 'run_sweep')
        def run_sweep(jobs):
            ...
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            logger = sim_logger.get_logger(func.__module__, component)

            with sim_logger.log_operation(logger, operation, component):
                return func(*args, **kwargs)

        return wrapper

    return decorator


# Global instance
sim_logger = SimLogger()
