"""Outcome files: one tab-separated record per line under a fixed header."""

from __future__ import annotations

import io
import os
import re
from typing import Iterable, TextIO

from .errors import OutcomeFormatError
from .rates import OutcomeRecord

HEADER = ("model_id", "trial_id", "b", "b_hat")
_DECIMAL = re.compile(r"[0-9]+\Z")


def parse_outcomes(stream: TextIO) -> list[OutcomeRecord]:
    """Parse an outcome stream; row numbers in errors are 1-based file lines."""
    lines = stream.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise OutcomeFormatError(1, "missing header")
    if tuple(lines[0].rstrip("\r").split("\t")) != HEADER:
        raise OutcomeFormatError(1, "header must be " + "\\t".join(HEADER))
    records = []
    for row, line in enumerate(lines[1:], start=2):
        fields = line.rstrip("\r").split("\t")
        if len(fields) != 4:
            raise OutcomeFormatError(row, f"expected 4 fields, found {len(fields)}")
        if not all(_DECIMAL.match(f) for f in fields):
            raise OutcomeFormatError(row, "fields must be nonnegative decimal integers")
        model_id, trial_id, b, b_hat = (int(f) for f in fields)
        if b > 1 or b_hat > 1:
            raise OutcomeFormatError(row, "b and b_hat must be 0 or 1")
        records.append(OutcomeRecord(model_id, trial_id, b, b_hat))
    return records


def read_outcomes(path: str | os.PathLike) -> list[OutcomeRecord]:
    with open(path, encoding="ascii", errors="strict", newline="") as fh:
        try:
            return parse_outcomes(fh)
        except UnicodeDecodeError as exc:
            raise OutcomeFormatError(1, f"file is not ASCII ({exc.reason})") from None


def format_outcomes(records: Iterable[OutcomeRecord]) -> str:
    buf = io.StringIO()
    buf.write("\t".join(HEADER) + "\n")
    for r in records:
        buf.write(f"{r.model_id}\t{r.trial_id}\t{r.b}\t{r.b_hat}\n")
    return buf.getvalue()


def write_outcomes(records: Iterable[OutcomeRecord], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(format_outcomes(records))
