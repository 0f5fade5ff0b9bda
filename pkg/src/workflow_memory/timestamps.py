"""UTC timestamp handling shared across the package.

All persisted timestamps are RFC 3339 UTC with millisecond precision,
e.g. ``2025-01-01T12:30:00.000Z``.
"""

from __future__ import annotations

from datetime import datetime, timezone


def utc_now() -> datetime:
    """Current UTC time, truncated to millisecond precision."""
    return truncate_to_millis(datetime.now(timezone.utc))


def truncate_to_millis(dt: datetime) -> datetime:
    if dt.tzinfo is None:
        raise ValueError("naive datetimes are not allowed; use UTC-aware values")
    dt = dt.astimezone(timezone.utc)
    return dt.replace(microsecond=(dt.microsecond // 1000) * 1000)


def format_timestamp(dt: datetime) -> str:
    """Render as RFC 3339 UTC with exactly three fractional digits."""
    dt = truncate_to_millis(dt)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{dt.microsecond // 1000:03d}Z"


def parse_timestamp(text: str) -> datetime:
    """Parse an RFC 3339 timestamp; raises ValueError on malformed input.

    Accepts a trailing ``Z`` or an explicit UTC offset; the result is
    normalized to UTC at millisecond precision.
    """
    if not isinstance(text, str) or not text:
        raise ValueError(f"expected an RFC 3339 timestamp, got {text!r}")
    candidate = text[:-1] + "+00:00" if text.endswith("Z") else text
    try:
        parsed = datetime.fromisoformat(candidate)
    except ValueError:
        raise ValueError(f"malformed timestamp {text!r}") from None
    if parsed.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return truncate_to_millis(parsed)
