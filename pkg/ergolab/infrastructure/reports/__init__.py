"""Persistence of experiment reports."""

from .json_report_store import JsonReportStore

__all__ = ["JsonReportStore"]
