"""Timestamp helpers for run metadata."""

from datetime import datetime, timezone
from typing import Optional

from dateutil import parser


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def to_iso(dt: datetime) -> str:
    """ISO-8601 text, assuming UTC for naive datetimes."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.isoformat()


def parse_timestamp(text: str) -> Optional[datetime]:
    """Parse an ISO-8601 timestamp, None for empty or malformed input."""
    if not text or not text.strip():
        return None
    try:
        return parser.isoparse(text.strip())
    except (ValueError, OverflowError):
        return None


def elapsed_seconds(start: str, end: str) -> Optional[float]:
    start_dt, end_dt = parse_timestamp(start), parse_timestamp(end)
    if start_dt is None or end_dt is None:
        return None
    return (end_dt - start_dt).total_seconds()


def format_duration(seconds: Optional[float]) -> str:
    """Human-readable duration, e.g. ``1h 02m 03s``."""
    if seconds is None:
        return "N/A"
    total = int(round(seconds))
    hours, rest = divmod(total, 3600)
    minutes, secs = divmod(rest, 60)
    if hours:
        return f"{hours}h {minutes:02d}m {secs:02d}s"
    if minutes:
        return f"{minutes}m {secs:02d}s"
    return f"{secs}s"
