"""Human-readable tables and the flat machine-readable record stream.

The record stream is JSON Lines: one object per check, keys sorted, with at
least ``check`` (a stable dotted name) and ``status`` (``PASS``, ``FAIL`` or
``INFO``).  Other keys carry values and witnesses as strings or integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .lengths import INF, format_length

PASS, FAIL, INFO = "PASS", "FAIL", "INFO"


def _plain(value):
    if value is INF or isinstance(value, Fraction):
        return format_length(value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return str(value)


@dataclass
class Record:
    check: str
    status: str
    fields: dict = field(default_factory=dict)

    def as_json(self) -> str:
        data = {k: _plain(v) for k, v in self.fields.items()}
        data["check"] = self.check
        data["status"] = self.status
        return json.dumps(data, sort_keys=True)


def verdict(ok: bool) -> str:
    return PASS if ok else FAIL


@dataclass
class Report:
    title: str
    records: list = field(default_factory=list)
    text: list = field(default_factory=list)

    def add(self, check: str, status: str, **fields) -> Record:
        r = Record(check, status, fields)
        self.records.append(r)
        return r

    def line(self, s: str = "") -> None:
        self.text.append(s)

    def table(self, header, rows) -> None:
        self.text.extend(table(header, rows))

    @property
    def failed(self) -> bool:
        return any(r.status == FAIL for r in self.records)

    def render(self, fmt: str = "text") -> str:
        if fmt == "records":
            return "".join(r.as_json() + "\n" for r in self.records)
        out = [self.title, ""] + self.text
        checks = [r for r in self.records if r.status != INFO]
        if checks:
            out.append("")
            out.extend(table(("check", "result"), [(r.check, r.status) for r in checks]))
        return "\n".join(out).rstrip() + "\n"


def table(header, rows) -> list:
    rows = [tuple(_cell(c) for c in r) for r in rows]
    header = tuple(header)
    widths = [len(h) for h in header]
    for r in rows:
        widths = [max(w, len(c)) for w, c in zip(widths, r)]
    fmt = "  ".join("{:<%d}" % w for w in widths)
    return [fmt.format(*header).rstrip(), fmt.format(*("-" * w for w in widths))] + [
        fmt.format(*r).rstrip() for r in rows
    ]


def _cell(c) -> str:
    if c is INF or isinstance(c, Fraction):
        return format_length(c)
    if isinstance(c, bool):
        return "yes" if c else "no"
    if c is None:
        return "-"
    if isinstance(c, (list, tuple)):
        return ",".join(_cell(x) for x in c) or "-"
    return str(c)
