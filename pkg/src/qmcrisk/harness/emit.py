"""CSV and JSON output for run records."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import fields
from pathlib import Path
from typing import Sequence

from .runner import RunRecord

CSV_HEADER = ("scenario", "n", "z0", "p_est", "delta_p", "p_oracle", "abs_error", "qubits", "depth", "seconds")


class EmitError(OSError):
    pass


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def to_csv(records: Sequence[RunRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])
    return buf.getvalue()


def to_json(records: Sequence[RunRecord]) -> str:
    return json.dumps([r.to_dict() for r in records], indent=2) + "\n"


def from_json(text: str) -> list[RunRecord]:
    names = {f.name for f in fields(RunRecord)}
    out = []
    for item in json.loads(text):
        if set(item) != names:
            raise ValueError(f"record keys {sorted(item)} do not match {sorted(names)}")
        out.append(RunRecord(**item))
    return out


def from_csv(text: str) -> list[RunRecord]:
    rows = list(csv.DictReader(io.StringIO(text)))
    ints = {"n", "z0", "qubits", "depth"}
    return [
        RunRecord(**{k: (int(v) if k in ints else v if k == "scenario" else float(v)) for k, v in row.items()})
        for row in rows
    ]


def emit(records: Sequence[RunRecord], out_dir: str | Path, stem: str = "results", formats=("csv", "json")) -> list[Path]:
    """Write ``stem.csv`` and/or ``stem.json`` into ``out_dir``."""
    if not records:
        raise ValueError("no records to write")
    out_dir = Path(out_dir)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for fmt in formats:
            path = out_dir / f"{stem}.{fmt}"
            if fmt == "csv":
                path.write_text(to_csv(records))
            elif fmt == "json":
                path.write_text(to_json(records))
            else:
                raise ValueError(f"unknown format {fmt!r}")
            written.append(path)
    except OSError as exc:
        raise EmitError(f"cannot write results under {out_dir}: {exc}") from exc
    return written
