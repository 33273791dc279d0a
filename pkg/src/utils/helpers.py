"""
Helper Utilities
Formatting of high precision numbers and report serialization
"""

from typing import Dict, Any, List, Iterable, Optional
import csv
import io
import json

import mpmath


def format_decimal(value: Any, digits: int) -> str:
    """
    Format a real number as a decimal string

    Args:
        value: mpf, int or Fraction
        digits: Significant digits to keep

    Returns:
        str: Decimal string without binary float loss
    """
    return mpmath.nstr(mpmath.mpf(value), digits, strip_zeros=False)


def format_complex(value: Any, digits: int) -> Dict[str, str]:
    """
    Format a complex number as real/imag decimal strings

    Args:
        value: mpc or mpf
        digits: Significant digits to keep

    Returns:
        Dict with "re" and "im"
    """
    z = mpmath.mpc(value)
    return {
        "re": format_decimal(z.real, digits),
        "im": format_decimal(z.imag, digits),
    }


def format_exponent(value: Any) -> str:
    """Short scientific rendering for residuals"""
    return mpmath.nstr(mpmath.mpf(value), 5)


def dump_json(data: Any) -> str:
    """
    Deterministic JSON dump (sorted keys, fixed indentation)

    Args:
        data: JSON-serializable data

    Returns:
        str: JSON document
    """
    return json.dumps(data, sort_keys=True, indent=2)


def flatten_dict(data: Dict[str, Any], prefix: str = "") -> Dict[str, Any]:
    """
    Flatten nested dictionaries into dotted keys for CSV output

    Args:
        data: Nested dictionary
        prefix: Key prefix

    Returns:
        Flat dictionary
    """
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        name = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, dict):
            flat.update(flatten_dict(value, name))
        elif isinstance(value, (list, tuple)):
            flat[name] = " ".join(str(item) for item in value)
        else:
            flat[name] = value
    return flat


def to_csv(rows: Iterable[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
    """
    Render rows as CSV

    Args:
        rows: Dictionaries (nested values are flattened)
        columns: Column order; defaults to the keys of the first row

    Returns:
        str: CSV document
    """
    flat_rows = [flatten_dict(row) for row in rows]
    if columns is None:
        columns = list(flat_rows[0].keys()) if flat_rows else []
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in flat_rows:
        writer.writerow({column: row.get(column, "") for column in columns})
    return buffer.getvalue()
