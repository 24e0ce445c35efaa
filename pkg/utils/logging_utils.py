from __future__ import annotations

import json
from fractions import Fraction


def format_fraction(value: Fraction) -> str:
    """Render a rational as `p/q`, or `p` when it is integral."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def custom_serializer(obj: object) -> object:
    """
    Custom serializer for the objects that show up in solver log records.

    Args:
        obj (object): Object to serialize.

    Returns:
        object: A JSON-compatible representation of the object.

    Raises:
        TypeError: If the object type cannot be serialized.
    """
    if isinstance(obj, Fraction):
        return format_fraction(obj)
    if isinstance(obj, (set, frozenset)):
        # Sets of mixed types fall back to their string order.
        try:
            return sorted(obj)
        except TypeError:
            return sorted(obj, key=str)
    if hasattr(obj, "__str__"):
        return str(obj)
    raise TypeError(f"Object of type {obj.__class__.__name__} is not JSON serializable")


def create_log_message(message: str, **kwargs) -> str:
    """
    Create a log message in JSON format.

    Args:
        message (str): Log message.
        **kwargs: Additional parameters for the log message.

    Returns:
        str: Log message in JSON format.
    """
    log_entry = {"message": message, **kwargs}
    return json.dumps(
        log_entry, default=custom_serializer, ensure_ascii=False, indent=4
    )
