#!/usr/bin/env python3
"""
Logging System for ngtele
=========================
Rotating log files for the main run, parameter sweeps, the Fock oracle and errors.
"""

import json
import logging
import time
import traceback
from functools import wraps
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from core.config import settings


class NGTeleLogger:
    def __init__(self, name: str = "ngtele", log_dir: Optional[Path] = None):
        self.name = name
        self.log_dir = Path(log_dir or settings.LOG_DIR).resolve()
        self.setup_logging()

    def setup_logging(self):
        """Setup logger, file handlers and console handler"""
        self.log_dir.mkdir(parents=True, exist_ok=True)

        # The package loggers (core.*, cli.*) propagate into this one
        self.logger = logging.getLogger(self.name)
        self.logger.setLevel(logging.DEBUG)
        self.logger.handlers.clear()

        detailed_formatter = logging.Formatter(
            '%(asctime)s | %(levelname)-8s | %(name)s | %(funcName)s:%(lineno)d | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        simple_formatter = logging.Formatter(
            '%(asctime)s | %(levelname)-8s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        self.setup_file_handlers(detailed_formatter, simple_formatter)
        self.setup_console_handler(simple_formatter)

        for package in ("core", "cli"):
            package_logger = logging.getLogger(package)
            package_logger.setLevel(logging.DEBUG)
            package_logger.handlers = self.logger.handlers
            package_logger.propagate = False

    def setup_file_handlers(self, detailed_formatter, simple_formatter):
        """One rotating file per log stream: (file, level, formatter, size MB, backups, filter)"""
        streams = [
            ('ngtele_main.log', logging.DEBUG if settings.DEBUG else logging.INFO, detailed_formatter, 10, 5, None),
            ('ngtele_sweeps.log', logging.INFO, simple_formatter, 5, 3, self.sweep_filter),
            ('ngtele_oracle.log', logging.INFO, simple_formatter, 5, 3, self.oracle_filter),
            ('ngtele_errors.log', logging.ERROR, detailed_formatter, 5, 5, None),
        ]
        for filename, level, formatter, size_mb, backups, record_filter in streams:
            handler = RotatingFileHandler(self.log_dir / filename, maxBytes=size_mb * 1024 * 1024, backupCount=backups)
            handler.setLevel(level)
            handler.setFormatter(formatter)
            if record_filter is not None:
                handler.addFilter(record_filter)
            self.logger.addHandler(handler)

    def setup_console_handler(self, formatter):
        """Console output goes to stderr so stdout stays clean for data"""
        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.INFO if not settings.DEBUG else logging.DEBUG)
        console_handler.setFormatter(formatter)
        self.logger.addHandler(console_handler)

    def sweep_filter(self, record):
        """Filter for sweep and optimizer logs"""
        sweep_keywords = ['SWEEP', 'optimiz', 'grid', 'table1', 'heatmap', 'kappa-scan', 'fid-scan']
        return any(keyword.lower() in record.getMessage().lower() for keyword in sweep_keywords)

    def oracle_filter(self, record):
        """Filter for Fock-basis oracle logs"""
        oracle_keywords = ['ORACLE', 'cutoff', 'Fock']
        return any(keyword.lower() in record.getMessage().lower() for keyword in oracle_keywords)

    def log_sweep_operation(self, operation, sweep_id=None, status=None, details=None):
        """Log a sweep milestone"""
        self.logger.info(f"SWEEP | {operation} | ID: {sweep_id} | Status: {status} | Details: {self._safe_json(details)}")

    def log_error(self, error, context=None):
        """Log errors with full traceback"""
        error_msg = f"ERROR | {str(error)}"
        if context:
            error_msg += f" | Context: {self._safe_json(context)}"
        error_msg += f" | Traceback: {traceback.format_exc()}"
        self.logger.error(error_msg)

    def _safe_json(self, data):
        """Safely convert data to a bounded JSON string"""
        if data is None:
            return "None"
        try:
            if isinstance(data, (dict, list)):
                return json.dumps(data, default=str)[:500]
            return str(data)[:500]
        except (TypeError, ValueError):
            return str(data)[:500]


# Global logger instance
ngtele_logger = NGTeleLogger()


def log_operation(operation):
    """Decorator timing an operation and logging failures with context"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.time()
            try:
                result = func(*args, **kwargs)
                ngtele_logger.logger.info(
                    f"{operation} | {func.__name__} | Duration: {time.time() - start_time:.3f}s"
                )
                return result
            except Exception as e:
                ngtele_logger.log_error(e, {
                    'operation': operation,
                    'function': func.__name__,
                    'kwargs': str(kwargs)[:200]
                })
                raise
        return wrapper
    return decorator


# Convenience functions
def log_info(message, context=None):
    """Log info message"""
    if context:
        message += f" | Context: {ngtele_logger._safe_json(context)}"
    ngtele_logger.logger.info(message)


def log_warning(message, context=None):
    """Log warning message"""
    if context:
        message += f" | Context: {ngtele_logger._safe_json(context)}"
    ngtele_logger.logger.warning(message)


def log_error(message, error=None, context=None):
    """Log error message"""
    if error:
        ngtele_logger.log_error(error, context)
    else:
        if context:
            message += f" | Context: {ngtele_logger._safe_json(context)}"
        ngtele_logger.logger.error(message)
