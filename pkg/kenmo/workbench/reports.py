"""Run reports: JSON for machines, plain or coloured text for people"""

from __future__ import annotations

import hashlib
import json
import os
from typing import Any, Optional, TextIO

from attrs import define, field

from kenmo.base import VerdictReport, all_passed

SCHEMA_VERSION = 1

_GREEN = "\033[32m"
_RED = "\033[31m"
_RESET = "\033[0m"


def digest(text: str) -> str:
    """sha256 of manifest text"""
    return hashlib.sha256(text.encode()).hexdigest()


def use_color(stream: TextIO) -> bool:
    """Colour unless ``NO_COLOR`` is set or `stream` is not a terminal"""
    if "NO_COLOR" in os.environ:
        return False
    isatty = getattr(stream, "isatty", None)
    return bool(isatty and isatty())


@define(eq=False)
class RunReport:
    """Outcome of one workbench command"""

    command: str
    source: str
    """Manifest path or fixture name"""
    digest: str
    """sha256 of the manifest text the run was built from"""
    version: str
    verdicts: list[VerdictReport] = field(factory=list)
    data: dict[str, Any] = field(factory=dict)
    """Command output besides verdicts (components, solved values, ...)"""
    warnings: list[str] = field(factory=list)
    timing: dict[str, float] = field(factory=dict)
    """Seconds per stage; excluded from determinism guarantees"""
    schema: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all_passed(self.verdicts)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def as_dict(self, timing: bool = True) -> dict[str, Any]:
        out = {
            "schema": self.schema,
            "version": self.version,
            "command": self.command,
            "source": self.source,
            "digest": self.digest,
            "passed": self.passed,
            "verdicts": [v.as_dict() for v in self.verdicts],
            "data": self.data,
            "warnings": list(self.warnings),
        }
        if timing:
            out["timing"] = {k: round(v, 6) for k, v in self.timing.items()}
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.as_dict(timing), indent=2, sort_keys=True, ensure_ascii=False)

    def to_text(self, color: bool = False) -> str:
        lines = [f"kenmo {self.version} {self.command} {self.source} (sha256 {self.digest[:12]})"]
        for key, value in self.data.items():
            lines.append("")
            lines.extend(_render_data(key, value))
        if self.verdicts:
            lines.append("")
        for verdict in self.verdicts:
            lines.extend(_render_verdict(verdict, color, depth=0))
        for message in self.warnings:
            lines.append(f"warning: {message}")
        lines.append("")
        summary = "all checks passed" if self.passed else "some checks failed"
        lines.append(_paint(summary, self.passed, color))
        return "\n".join(lines) + "\n"


def _paint(text: str, passed: bool, color: bool) -> str:
    if not color:
        return text
    return f"{_GREEN if passed else _RED}{text}{_RESET}"


def _render_data(key: str, value: Any, indent: str = "") -> list[str]:
    if isinstance(value, dict):
        lines = [f"{indent}{key}:"]
        for k, v in value.items():
            if isinstance(v, (dict, list)):
                lines.extend(_render_data(k, v, indent + "  "))
            else:
                lines.append(f"{indent}  {k} = {v}")
        return lines
    if isinstance(value, list):
        return [f"{indent}{key}:"] + [f"{indent}  {item}" for item in value]
    return [f"{indent}{key} = {value}"]


def _render_verdict(verdict: VerdictReport, color: bool, depth: int) -> list[str]:
    pad = "  " * depth
    status = _paint("PASS" if verdict.passed else "FAIL", verdict.passed, color)
    line = f"{pad}{status} {verdict.name}"
    if verdict.solved:
        line += " (" + ", ".join(f"{k} = {v}" for k, v in sorted(verdict.solved.items())) + ")"
    if verdict.classification is not None:
        line += f" [{verdict.classification}]"
    if not verdict.precondition_met:
        line += " {precondition unmet}"
    lines = [line]
    if verdict.witness is not None:
        lines.append(f"{pad}    witness {verdict.witness.describe()}")
    lines.extend(f"{pad}    {note}" for note in verdict.notes)
    for sub in verdict.subchecks:
        lines.extend(_render_verdict(sub, color, depth + 1))
    return lines


def write_report(report: RunReport, fmt: str, stream: TextIO, color: Optional[bool] = None):
    if fmt == "json":
        stream.write(report.to_json() + "\n")
        return
    stream.write(report.to_text(use_color(stream) if color is None else color))
