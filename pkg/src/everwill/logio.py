"""Versioned JSONL history logs: canonical encoding, writing, reading.

A log is one JSON record per line, typed by a ``kind`` field: a header
(config echo, society, roster, seed), an ``init`` record with the initial
state, one ``step`` record per transition (battle outcome plus optional
state snapshot), and a footer with the final metrics.  Encoding is
canonical (sorted keys, no whitespace, no timestamps) so identical runs
produce byte-identical logs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

FORMAT_VERSION = 1


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass
class HistoryLog:
    header: dict
    records: list[dict] = field(default_factory=list)
    footer: dict | None = None

    def lines(self) -> Iterator[str]:
        yield dumps_canonical(self.header)
        for record in self.records:
            yield dumps_canonical(record)
        if self.footer is not None:
            yield dumps_canonical(self.footer)

    def to_text(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text(), encoding="utf-8")
        return path


def parse_log(lines: Iterator[str]) -> HistoryLog:
    header = None
    records: list[dict] = []
    footer = None
    for line in lines:
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        kind = record.get("kind")
        if kind == "header":
            header = record
        elif kind == "footer":
            footer = record
        else:
            records.append(record)
    if header is None:
        raise ValueError("log has no header record")
    return HistoryLog(header=header, records=records, footer=footer)


def read_log(path: str | Path) -> HistoryLog:
    with Path(path).open("r", encoding="utf-8") as fh:
        return parse_log(fh)
