"""JSON-serialisable verification reports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = "1.0"
VERDICTS = ("pass", "fail", "skipped")


@dataclass
class Check:
    name: str
    verdict: str
    detail: str = ""
    witness: dict | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "verdict": self.verdict}
        if self.detail:
            d["detail"] = self.detail
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class Report:
    command: str
    conventions: dict[str, str] = field(default_factory=dict)
    inputs: dict[str, Any] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    results: dict[str, Any] = field(default_factory=dict)

    def check(self, name: str, ok: bool, *, witness: dict | None = None, detail: str = "") -> bool:
        if not ok and witness is None:
            witness = {"detail": detail or name}
        self.checks.append(Check(name, "pass" if ok else "fail", detail, None if ok else witness))
        return ok

    def skip(self, name: str, detail: str):
        self.checks.append(Check(name, "skipped", detail))

    def extend(self, other: Report, prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.verdict, c.detail, c.witness))
        for k, v in other.results.items():
            self.results.setdefault(k, v)

    @property
    def passed(self) -> bool:
        return all(c.verdict != "fail" for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.verdict == "fail"]

    def verdict(self, name: str) -> str:
        for c in self.checks:
            if c.name == name:
                return c.verdict
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "status": "pass" if self.passed else "fail",
            "conventions": dict(self.conventions),
            "inputs": self.inputs,
            "checks": [c.to_dict() for c in self.checks],
            "results": self.results,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def render_text(self) -> str:
        lines = [f"{self.command}: {'PASS' if self.passed else 'FAIL'}"]
        for k, v in sorted(self.conventions.items()):
            lines.append(f"  convention {k} = {v}")
        for c in self.checks:
            mark = {"pass": "ok  ", "fail": "FAIL", "skipped": "skip"}[c.verdict]
            line = f"  [{mark}] {c.name}"
            if c.detail:
                line += f"  ({c.detail})"
            lines.append(line)
            if c.witness:
                lines.append(f"         witness: {json.dumps(c.witness, sort_keys=True)}")
        for k in sorted(self.results):
            v = self.results[k]
            if isinstance(v, dict):
                lines.append(f"  {k}:")
                for kk in sorted(v):
                    lines.append(f"      {kk}: {v[kk]}")
            else:
                lines.append(f"  {k} = {v}")
        return "\n".join(lines)
