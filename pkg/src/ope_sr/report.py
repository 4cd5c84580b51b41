"""Structured experiment output with lossless CSV and JSON serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

_TYPES = {"str": str, "int": int, "float": float, "bool": lambda s: s == "True"}


def _type_name(v) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, float):
        return "float"
    return "str"


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _jsonable(v):
    # numpy scalars and tuples -> plain python
    if hasattr(v, "item") and not isinstance(v, (list, dict, str)):
        return v.item()
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class RunReport:
    command: str
    params: dict = field(default_factory=dict)
    items: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    passed: bool = True
    notes: list = field(default_factory=list)

    def add(self, **item) -> dict:
        # None is dropped so that "missing" has a single CSV spelling (empty cell).
        item = {k: _jsonable(v) for k, v in item.items() if v is not None}
        self.items.append(item)
        return item

    def columns(self) -> list:
        cols = []
        for item in self.items:
            for k in item:
                if k not in cols:
                    cols.append(k)
        return cols

    def summary_lines(self) -> list:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"[{status}] {self.command}"]
        for k, v in self.aggregates.items():
            lines.append(f"  {k}: {json.dumps(v)}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return lines

    # -- JSON ------------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": _jsonable(self.params),
            "items": _jsonable(self.items),
            "aggregates": _jsonable(self.aggregates),
            "passed": bool(self.passed),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))

    # -- CSV -------------------------------------------------------------------
    # Item rows are the CSV body; metadata and per-column types ride along as
    # leading "# key: json" comment lines so the round trip is exact.

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = self.columns()
        schema = {}
        for c in cols:
            kinds = {_type_name(item[c]) for item in self.items if c in item}
            if kinds == {"int", "float"}:
                kinds = {"float"}
            if len(kinds) > 1:
                raise ValueError(f"column {c!r} mixes types {sorted(kinds)}")
            schema[c] = kinds.pop()
        meta = {
            "command": self.command,
            "params": _jsonable(self.params),
            "aggregates": _jsonable(self.aggregates),
            "passed": bool(self.passed),
            "notes": list(self.notes),
            "schema": schema,
        }
        for k, v in meta.items():
            buf.write(f"# {k}: {json.dumps(v)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for item in self.items:
            writer.writerow([_cell(item[c]) if c in item else "" for c in cols])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RunReport":
        meta = {}
        body = []
        for line in text.splitlines():
            if line.startswith("# ") and not body:
                key, _, value = line[2:].partition(": ")
                meta[key] = json.loads(value)
            else:
                body.append(line)
        schema = meta.pop("schema", {})
        rows = list(csv.reader(body))
        items = []
        if rows:
            cols = rows[0]
            for row in rows[1:]:
                item = {}
                for c, cell in zip(cols, row):
                    if cell == "":
                        continue
                    item[c] = _TYPES[schema.get(c, "str")](cell)
                items.append(item)
        return cls(items=items, **meta)

    # -- files -----------------------------------------------------------------

    def write(self, path, fmt: str | None = None) -> Path:
        path = Path(path)
        fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() if fmt == "json" else self.to_csv())
        return path

    @classmethod
    def read(cls, path) -> "RunReport":
        text = Path(path).read_text()
        if Path(path).suffix.lower() == ".json":
            return cls.from_json(text)
        return cls.from_csv(text)

