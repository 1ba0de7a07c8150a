"""
Timestamp utilities for run manifests and log records.
Everything is stored and displayed in UTC.
"""
from datetime import datetime, timezone
from logging import Formatter


def now_utc():
    """Get current time in UTC with timezone awareness"""
    return datetime.now(timezone.utc)


def format_utc(dt, format_str='%Y-%m-%dT%H:%M:%SZ'):
    """
    Format a datetime in UTC

    Args:
        dt: datetime object (naive values are assumed to be UTC already)
        format_str: strftime format string

    Returns:
        Formatted string, or None for a missing datetime
    """
    if dt is None:
        return None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).strftime(format_str)


class UTCFormatter(Formatter):
    """Formatter that renders log timestamps in UTC"""
    def formatTime(self, record, datefmt=None):
        dt = datetime.fromtimestamp(record.created, tz=timezone.utc)
        if datefmt:
            return dt.strftime(datefmt)
        return dt.strftime('%Y-%m-%d %H:%M:%S UTC')
