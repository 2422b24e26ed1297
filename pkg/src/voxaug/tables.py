"""CSV exchange formats for metric and rank tables.

Metric tables use the header ``subject_id,model_id,region,dice,hd95_mm``
with one row per (subject, model, region). Rows are sorted by that key
triple before writing so parallel producers yield byte-identical files.
Floats are rendered with ``repr`` (shortest round-trip form).
"""

import csv
from pathlib import Path

from .metrics import MetricRecord
from .stats import RankEntry

METRIC_HEADER = ("subject_id", "model_id", "region", "dice", "hd95_mm")
RANK_HEADER = ("model_id", "rank_score")


def _sorted_rows(records: list[MetricRecord]) -> list[MetricRecord]:
    return sorted(records, key=lambda r: (r.subject_id, r.model_id, r.region))


def write_metrics(records: list[MetricRecord], path, append: bool = False) -> None:
    """Write (or append) a metric table; the appended block is itself sorted."""
    path = Path(path)
    write_header = True
    if append and path.exists() and path.stat().st_size > 0:
        with open(path, newline="") as f:
            first = next(csv.reader(f), None)
        if first != list(METRIC_HEADER):
            raise ValueError(f"{path}: existing header {first} does not match {list(METRIC_HEADER)}")
        write_header = False
    mode = "a" if (append and not write_header) else "w"
    with open(path, mode, newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        if write_header:
            w.writerow(METRIC_HEADER)
        for r in _sorted_rows(records):
            w.writerow([r.subject_id, r.model_id, r.region, repr(r.dice), repr(r.hd95_mm)])


def read_metrics(path) -> list[MetricRecord]:
    path = Path(path)
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != list(METRIC_HEADER):
            raise ValueError(f"{path}: bad header {header}, expected {list(METRIC_HEADER)}")
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(METRIC_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(METRIC_HEADER)} fields, got {len(row)}")
            subject_id, model_id, region, dice_s, hd95_s = row
            try:
                rec = MetricRecord(
                    subject_id=subject_id,
                    model_id=model_id,
                    region=region,
                    dice=float(dice_s),
                    hd95_mm=float(hd95_s),
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            records.append(rec)
    return records


def write_ranks(entries: list[RankEntry], path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(RANK_HEADER)
        for e in entries:
            w.writerow([e.model_id, repr(e.rank_score)])
