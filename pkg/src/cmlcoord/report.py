"""Check results and the report object emitted by every CLI command."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np


def jsonable(obj):
    """Convert witnesses (tuples, sets, numpy scalars, ...) to plain JSON."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return sorted((jsonable(x) for x in obj), key=lambda x: json.dumps(x, sort_keys=True))
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


@dataclass
class Check:
    name: str
    passed: bool
    witness: object = None
    detail: object = None

    def to_dict(self):
        out = {"name": self.name, "passed": bool(self.passed)}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.detail is not None:
            out["detail"] = jsonable(self.detail)
        return out


class CheckList(list):
    """A list of :class:`Check` with lookup by name."""

    @property
    def ok(self):
        return all(c.passed for c in self)

    def __getitem__(self, key):
        if isinstance(key, str):
            for c in self:
                if c.name == key:
                    return c
            raise KeyError(key)
        return super().__getitem__(key)

    def failures(self):
        return [c for c in self if not c.passed]


def digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RunReport:
    command: str
    inputs: list = field(default_factory=list)
    checks: CheckList = field(default_factory=CheckList)
    data: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def add(self, name, passed, witness=None, detail=None):
        self.checks.append(Check(name, bool(passed), witness, detail))

    def extend(self, checks, prefix=""):
        for c in checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.witness, c.detail))

    def to_dict(self, timings=False):
        out = {
            "command": self.command,
            "inputs": jsonable(self.inputs),
            "checks": [c.to_dict() for c in self.checks],
            "data": jsonable(self.data),
            "ok": self.ok,
        }
        if timings:
            out["timings"] = {k: round(v, 3) for k, v in self.timings.items()}
        return out

    def to_json(self, timings=False):
        return json.dumps(self.to_dict(timings), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def to_text(self, timings=False):
        lines = [f"# {self.command}"]
        for inp in self.inputs:
            lines.append(f"input {inp.get('source')} sha256={inp.get('sha256', '')[:16]}")
        for key in sorted(self.data):
            val = jsonable(self.data[key])
            if isinstance(val, (dict, list)):
                val = json.dumps(val, sort_keys=True, ensure_ascii=False)
            lines.append(f"{key}: {val}")
        for c in self.checks:
            line = f"{'PASS' if c.passed else 'FAIL'} {c.name}"
            if c.witness is not None:
                line += f"  witness={json.dumps(jsonable(c.witness), sort_keys=True, ensure_ascii=False)}"
            lines.append(line)
        if timings:
            for k, v in self.timings.items():
                lines.append(f"time {k}: {v:.3f}s")
        lines.append("OK" if self.ok else "FAILED")
        return "\n".join(lines) + "\n"
