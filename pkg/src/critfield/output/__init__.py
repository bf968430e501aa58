"""Report writing."""

from critfield.output.reporter import CSV_COLUMNS, Reporter, print_block

__all__ = ["CSV_COLUMNS", "Reporter", "print_block"]
