"""Validation and parsing helpers for configuration values."""

from typing import Any, Dict, List, Sequence, Tuple


def parse_float_list(value: str, field_name: str) -> Tuple[float, ...]:
    """Parse a comma-separated list of numbers; an empty string gives an empty tuple."""
    text = value.strip()
    if not text:
        return ()
    try:
        return tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError:
        raise ValueError(f"{field_name} must be a comma-separated list of numbers")


def parse_mapping(value: str, field_name: str) -> Dict[str, float]:
    """Parse ``name:value`` pairs separated by commas."""
    result: Dict[str, float] = {}
    for item in value.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, number = item.partition(":")
        if not sep or not name.strip():
            raise ValueError(f"{field_name} entries must look like name:value")
        try:
            result[name.strip()] = float(number)
        except ValueError:
            raise ValueError(f"{field_name} entry {name.strip()!r} is not a number")
    return result


def format_float_list(values: Sequence[float]) -> str:
    return ", ".join(repr(float(v)) for v in values)


def format_mapping(values: Dict[str, float]) -> str:
    return ", ".join(f"{k}:{float(v)!r}" for k, v in values.items())


def validate_probability(value: float, field_name: str, upper: float = 1.0) -> float:
    if not 0.0 <= value < upper:
        raise ValueError(f"{field_name} must lie in [0, {upper})")
    return value


def validate_required_fields(data: Dict[str, Any], required_fields: List[str]) -> None:
    """Validate that dictionary contains all required fields."""
    missing_fields = [field for field in required_fields if field not in data or data[field] is None]
    if missing_fields:
        raise ValueError(f"Missing required fields: {', '.join(missing_fields)}")


def sanitize_filename(filename: str) -> str:
    """Sanitize filename by removing/replacing invalid characters."""
    invalid_chars = '<>:"/\\|?* '
    sanitized = filename
    for char in invalid_chars:
        sanitized = sanitized.replace(char, "_")
    sanitized = sanitized.strip(" ._")
    return sanitized or "output"
