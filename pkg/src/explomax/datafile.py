"""CSV data files of observed failures.

One row per observed failure with header ``time,component``. Survivors have
no rows, so ``n``, ``T`` and ``delta`` always come from the caller.
"""
from __future__ import annotations

import csv
import io
import math

from .exceptions import DomainError
from .likelihood import CensoredSample

__all__ = ["DataFileError", "read_datafile", "parse_datafile", "write_datafile", "format_datafile"]

HEADER = ["time", "component"]


class DataFileError(DomainError):
    def __init__(self, message, row=None):
        super().__init__(f"row {row}: {message}" if row is not None else message)
        self.row = row


def parse_datafile(text: str, n: int, censor_time: float) -> CensoredSample:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DataFileError("empty file; expected header 'time,component'", row=1) from None
    if [h.strip().lower() for h in header] != HEADER:
        raise DataFileError(f"expected header 'time,component', got {','.join(header)!r}", row=1)
    obs = {1: [], 2: []}
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise DataFileError(f"expected 2 fields, got {len(row)}", row=row_no)
        try:
            t = float(row[0])
        except ValueError:
            raise DataFileError(f"time {row[0]!r} is not a number", row=row_no) from None
        if not math.isfinite(t) or t <= 0:
            raise DataFileError(f"time must be positive, got {row[0]!r}", row=row_no)
        if t > censor_time:
            raise DataFileError(f"time {t} exceeds the censoring time {censor_time}", row=row_no)
        comp = row[1].strip()
        if comp not in ("1", "2"):
            raise DataFileError(f"component must be 1 or 2, got {row[1]!r}", row=row_no)
        obs[int(comp)].append(t)
    r = len(obs[1]) + len(obs[2])
    if r > n:
        raise DataFileError(f"{r} failure rows exceed n = {n}")
    return CensoredSample(obs[1], obs[2], n, censor_time)


def read_datafile(path, n: int, censor_time: float) -> CensoredSample:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_datafile(fh.read(), n, censor_time)


def format_datafile(sample: CensoredSample) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    rows = [(t, 1) for t in sample.obs1] + [(t, 2) for t in sample.obs2]
    for t, comp in sorted(rows):
        # repr round-trips a float exactly
        writer.writerow([repr(float(t)), comp])
    return buf.getvalue()


def write_datafile(path, sample: CensoredSample) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_datafile(sample))
