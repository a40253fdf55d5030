"""Report store writing deterministic JSON and CSV files into an output directory."""

from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import csv
import json
import logging
import os

from ...core.interfaces.report_store import IReportStore, LockError
from ...utils.serialization import to_jsonable


class JsonReportStore(IReportStore):
    """One experiment at a time per directory, guarded by a lock file."""

    def __init__(self, root: Path, lock_name: str = ".ergolab.lock", write_csv: bool = True) -> None:
        self.root = Path(root)
        self.lock_name = lock_name
        self.csv_enabled = write_csv
        self.logger = logging.getLogger(__name__)
        self._lock_path: Optional[Path] = None

    @property
    def root_path(self) -> Path:
        return self.root

    def acquire_lock(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.root / self.lock_name
        try:
            fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise LockError(f"Output directory {self.root} is locked by {path}")
        with os.fdopen(fd, "w") as f:
            f.write(str(os.getpid()))
        self._lock_path = path
        self.logger.debug(f"Acquired {path}")

    def release_lock(self) -> None:
        if self._lock_path is None:
            return
        try:
            self._lock_path.unlink()
        except FileNotFoundError:
            self.logger.warning(f"Lock file {self._lock_path} disappeared before release")
        self._lock_path = None

    def __enter__(self) -> "JsonReportStore":
        self.acquire_lock()
        return self

    def __exit__(self, *exc: Any) -> None:
        self.release_lock()

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(to_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False)
        path.write_text(text + "\n", encoding="utf-8")
        self.logger.info(f"Wrote {path}")
        return path

    def write_csv(self, name: str, headers: List[str], rows: Sequence[Sequence[Any]]) -> Path:
        path = self.root / name
        if not self.csv_enabled:
            self.logger.debug(f"CSV output disabled, skipping {path}")
            return path
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(headers)
            for row in rows:
                writer.writerow([to_jsonable(v) for v in row])
        self.logger.info(f"Wrote {path}")
        return path
