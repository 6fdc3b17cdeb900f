"""Trace files: one CSV per learner, appended one row per time step"""

import logging
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from .errors import TraceFormatError
from .metrics import TraceRecord

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SCHEMA_HEADER = f"# schema_version: {SCHEMA_VERSION}"
TRACE_SUFFIX = ".trace.csv"
REQUIRED_COLUMNS = ("t", "learner", "elbo", "tmll")


class TraceWriter:
    """Append-only writer; every record is flushed as soon as it is written"""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.columns: Optional[List[str]] = None
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.path, "w", newline="")
        self._file.write(SCHEMA_HEADER + "\n")
        self._file.flush()

    def write(self, record: TraceRecord):
        row = record.to_row()
        header = self.columns is None
        if header:
            self.columns = list(row)
        elif list(row) != self.columns:
            raise TraceFormatError(f"record columns {list(row)} differ from header {self.columns}", str(self.path))
        pd.DataFrame([row], columns=self.columns).to_csv(self._file, header=header, index=False)
        self._file.flush()

    def close(self):
        if not self._file.closed:
            self._file.close()

    def __enter__(self) -> "TraceWriter":
        return self

    def __exit__(self, *exc):
        self.close()


class TraceStore:
    """Trace files of one run directory"""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def trace_path(self, learner: str) -> Path:
        return self.directory / f"{learner}{TRACE_SUFFIX}"

    def writer(self, learner: str) -> TraceWriter:
        return TraceWriter(self.trace_path(learner))

    def list_traces(self) -> List[Path]:
        return sorted(self.directory.glob(f"*{TRACE_SUFFIX}"))

    def load_trace(self, path: Path) -> pd.DataFrame:
        """Read and validate one trace file"""
        path = Path(path)
        with open(path, "r") as f:
            first = f.readline().strip()
        if first != SCHEMA_HEADER:
            raise TraceFormatError(f"expected '{SCHEMA_HEADER}' header, found '{first}'", str(path))
        try:
            frame = pd.read_csv(path, comment="#")
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise TraceFormatError(f"unreadable trace: {e}", str(path))
        missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
        if missing:
            raise TraceFormatError(f"missing columns {missing}", str(path))
        if frame.empty:
            raise TraceFormatError("trace has no records", str(path))
        return frame

    def load_records(self, path: Path) -> List[TraceRecord]:
        frame = self.load_trace(path)
        try:
            return [TraceRecord.from_row(row) for row in frame.to_dict(orient="records")]
        except (TypeError, ValueError) as e:
            raise TraceFormatError(f"malformed record: {e}", str(path))

    def load_all(self) -> Dict[str, List[TraceRecord]]:
        return {path.name[: -len(TRACE_SUFFIX)]: self.load_records(path) for path in self.list_traces()}
