"""CSV stream ingestion and serialization"""

import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..errors import StreamFormatError
from .base import Batch, holdout_mask

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
SPLIT_COLUMN = "split"
SPLIT_VALUES = ("train", "test")


def load_csv_stream(path: str | Path, batch_column: str, split_seed: int,
                    columns: Optional[Sequence[str]] = None) -> List[Batch]:
    """
    Group rows of a CSV file into time-ordered batches

    Args:
        path: CSV file with a header row; lines starting with '#' are ignored
        batch_column: Column whose values define the batches, in sorted key order
        split_seed: Seed of the 2/3 train, 1/3 test split, used unless the file has a 'split' column
        columns: Observation columns; defaults to every other column

    Returns:
        List of Batch with t = 1, 2, ... and the original key
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"stream file not found: {path}")
    try:
        frame = pd.read_csv(path, comment="#")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise StreamFormatError(f"{path}: {e}")

    if batch_column not in frame.columns:
        raise StreamFormatError(f"{path}: missing batch column '{batch_column}'")
    has_split = SPLIT_COLUMN in frame.columns
    if columns is None:
        columns = [c for c in frame.columns if c not in (batch_column, SPLIT_COLUMN)]
    missing = [c for c in columns if c not in frame.columns]
    if missing or not columns:
        raise StreamFormatError(f"{path}: missing observation columns {missing or '(none)'}")

    values = frame[list(columns)].apply(pd.to_numeric, errors="coerce")
    bad = values.isna().any(axis=1) | frame[batch_column].isna()
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0]) + 1
        raise StreamFormatError(f"unparseable value in {path}", row=row)
    if has_split:
        invalid = ~frame[SPLIT_COLUMN].isin(SPLIT_VALUES)
        if invalid.any():
            row = int(np.flatnonzero(invalid.to_numpy())[0]) + 1
            raise StreamFormatError(f"split must be 'train' or 'test' in {path}", row=row)

    data = values.to_numpy(dtype=float)
    if data.shape[1] == 1:
        data = data[:, 0]

    batches = []
    for t, (key, index) in enumerate(sorted(frame.groupby(batch_column, sort=True).indices.items()), start=1):
        rows = data[index]
        if has_split:
            mask = frame[SPLIT_COLUMN].to_numpy()[index] == "test"
            if mask.all():
                raise StreamFormatError(f"batch '{key}' in {path} has no train rows", row=int(index[0]) + 1)
        else:
            mask = holdout_mask(split_seed, t, len(index))
        batches.append(Batch(t=t, train=rows[~mask], test=rows[mask], key=key))

    logger.info(f"Loaded {len(batches)} batch(es) from {path}")
    return batches


def write_stream(batches: Iterable[Batch], path: str | Path) -> int:
    """Serialize batches with columns t, split, value (or value_0 ... value_{d-1})

    Returns:
        Number of rows written
    """
    frames = []
    for batch in batches:
        for split, rows in (("train", batch.train), ("test", batch.test)):
            rows = np.asarray(rows)
            if len(rows) == 0:
                continue
            if rows.ndim == 1:
                part = pd.DataFrame({"value": rows})
            else:
                part = pd.DataFrame(rows, columns=[f"value_{i}" for i in range(rows.shape[1])])
            part.insert(0, "split", split)
            part.insert(0, "t", batch.t)
            frames.append(part)
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=["t", "split", "value"])

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        f.write(f"# schema_version: {SCHEMA_VERSION}\n")
        frame.to_csv(f, index=False)
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return len(frame)
