"""Formatters for planner runs and verification summaries."""

from .base_formatter import BaseFormatter
from .json_format import JSONFormatter
from .rich_formatter import RichFormatter
from .standard import StandardFormatter

FORMATTERS = {
    "standard": StandardFormatter,
    "json": JSONFormatter,
    "rich": RichFormatter,
}

__all__ = [
    "FORMATTERS",
    "BaseFormatter",
    "JSONFormatter",
    "RichFormatter",
    "StandardFormatter",
]
