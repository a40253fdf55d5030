"""Unit tests for JsonReportStore."""

import json

import pytest

from ergolab.core.domain.intervals import ValueInterval
from ergolab.core.interfaces.report_store import LockError
from ergolab.infrastructure.reports import JsonReportStore


class TestJsonReportStore:
    """Test cases for JsonReportStore."""

    def test_lock_is_exclusive(self, tmp_path):
        # Arrange
        first = JsonReportStore(tmp_path)
        second = JsonReportStore(tmp_path)
        first.acquire_lock()

        # Act & Assert
        with pytest.raises(LockError, match="is locked"):
            second.acquire_lock()
        first.release_lock()
        second.acquire_lock()
        second.release_lock()
        assert not (tmp_path / ".ergolab.lock").exists()

    def test_context_manager_releases_the_lock(self, tmp_path):
        with JsonReportStore(tmp_path):
            assert (tmp_path / ".ergolab.lock").exists()
        assert not (tmp_path / ".ergolab.lock").exists()

    def test_json_is_deterministic(self, tmp_path):
        # Arrange
        store = JsonReportStore(tmp_path)
        payload = {"b": ValueInterval(0.0, float("inf")), "a": {(0, 1): 0.5}}

        # Act
        first = store.write_json("one.json", payload).read_text(encoding="utf-8")
        second = store.write_json("two.json", dict(reversed(list(payload.items())))).read_text(encoding="utf-8")

        # Assert
        assert first == second
        assert json.loads(first) == {"a": {"01": 0.5}, "b": {"lower": 0.0, "upper": "inf"}}

    def test_csv_tables(self, tmp_path):
        # Act
        path = JsonReportStore(tmp_path).write_csv("rows.csv", ["n", "value"], [[1, 0.5], [2, float("-inf")]])

        # Assert
        assert path.read_text(encoding="utf-8").splitlines() == ["n,value", "1,0.5", "2,-inf"]

    def test_csv_can_be_disabled(self, tmp_path):
        path = JsonReportStore(tmp_path, write_csv=False).write_csv("rows.csv", ["n"], [[1]])
        assert not path.exists()
