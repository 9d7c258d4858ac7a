# src/aging_ctrw/utils/logger.py
"""
Application logger with categories, an in-memory history and per-run summaries.
Console output goes to stderr so CSV/JSON written to stdout stays clean.
"""

import sys
from datetime import datetime
from typing import Dict, List

LEVELS = {'DEBUG': 10, 'INFO': 20, 'WARNING': 30, 'ERROR': 40}


class AppLogger:
    """Simulation logger with performance tracking"""

    def __init__(self, max_logs: int = 1000, level: str = "INFO", stream=None):
        self.logs: List[Dict] = []
        self.max_logs = max_logs
        self._seq = 0
        self.level = level.upper()
        self.stream = stream

    def set_level(self, level: str):
        level = level.upper()
        if level not in LEVELS:
            raise ValueError(f"Unknown log level: {level}")
        self.level = level

    def log(self, message: str, category: str = "GENERAL", level: str = "INFO", **kwargs):
        """Log a message with metadata"""
        entry = {
            'seq': self._seq,
            'timestamp': datetime.now(),
            'level': level.upper(),
            'category': category.upper(),
            'message': message,
            'metadata': kwargs
        }
        self._seq += 1
        self.logs.append(entry)
        if len(self.logs) > self.max_logs:
            self.logs = self.logs[-self.max_logs:]

        if LEVELS.get(entry['level'], 20) >= LEVELS.get(self.level, 20):
            stamp = entry['timestamp'].strftime("%H:%M:%S")
            print(f"[{stamp}] {entry['level']} {entry['category']}: {message}",
                  file=self.stream or sys.stderr)

    def info(self, message: str, category: str = "GENERAL", **kwargs):
        self.log(message, category, "INFO", **kwargs)

    def warning(self, message: str, category: str = "GENERAL", **kwargs):
        self.log(message, category, "WARNING", **kwargs)

    def error(self, message: str, category: str = "GENERAL", **kwargs):
        self.log(message, category, "ERROR", **kwargs)

    def debug(self, message: str, category: str = "GENERAL", **kwargs):
        self.log(message, category, "DEBUG", **kwargs)

    def track_performance(self, operation: str, duration_ms: float, success: bool = True, **metadata):
        self.log(f"{operation} completed in {duration_ms:.0f}ms ({'success' if success else 'failure'})",
                 "PERFORMANCE", "DEBUG", duration_ms=duration_ms, success=success, **metadata)

    def mark(self) -> int:
        """Sequence number of the next entry"""
        return self._seq

    def summary_since(self, mark: int, keep: int = 5) -> Dict:
        """Warning and error counts for entries logged at or after mark"""
        recent = [log for log in self.logs if log['seq'] >= mark]
        errors = [log['message'] for log in recent if log['level'] == "ERROR"]
        warnings = [log['message'] for log in recent if log['level'] == "WARNING"]
        return {
            'error_count': len(errors),
            'warning_count': len(warnings),
            'recent_errors': errors[-keep:],
            'recent_warnings': warnings[-keep:],
        }

    def clear(self):
        self.logs = []
        self.log("Logger cleared", "SYSTEM", "DEBUG")


# Global logger instance
app_logger = AppLogger()
