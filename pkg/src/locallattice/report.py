"""Structured command reports with a JSON form and a plain-text form."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_ERROR = 2

_EXIT = {"OK": EXIT_OK, "OBSTRUCTED": EXIT_FALSE, "ERROR": EXIT_ERROR}


def plain(value: Any) -> Any:
    """JSON-safe copy; infinities become the string ``"INFINITE"``."""
    if isinstance(value, float) and math.isinf(value):
        return "INFINITE"
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if hasattr(value, "value") and hasattr(value, "name"):
        return value.value
    if hasattr(value, "item"):
        return value.item()
    return value


@dataclass
class Report:
    command: str
    status: str = "OK"
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    error: dict | None = None

    @property
    def exit_code(self) -> int:
        return _EXIT[self.status]

    def to_dict(self) -> dict:
        out = {"command": self.command, "status": self.status, "inputs": plain(self.inputs), "results": plain(self.results)}
        if self.error is not None:
            out["error"] = plain(self.error)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(data["command"], data["status"], data.get("inputs", {}), data.get("results", {}), data.get("error"))

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"command: {self.command}", f"status: {self.status}"]
        if self.error is not None:
            lines.append(f"error: {self.error.get('code')}: {self.error.get('message')}")
        for section in ("inputs", "results"):
            body = plain(getattr(self, section))
            if not body:
                continue
            lines.append(f"{section}:")
            for key in sorted(body):
                val = body[key]
                if isinstance(val, (dict, list)):
                    val = json.dumps(val, sort_keys=True)
                lines.append(f"  {key}: {val}")
        return "\n".join(lines) + "\n"
