"""Command results and their text / machine renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .rational import fmt
from .tu import label

EXIT_CODES = {
    "holds": 0,
    "computed": 0,
    "yes": 0,
    "fails": 1,
    "no": 1,
    "undetermined": 3,
}
EXIT_INPUT_ERROR = 2


@dataclass
class Report:
    command: str
    verdict: str
    data: dict[str, Any] = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)  # human-readable body
    timing: Optional[float] = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]


def canonical(value: Any) -> Any:
    """JSON-ready copy with rationals as canonical strings."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value  # counts, player numbers
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if hasattr(value, "value"):  # enums
        return canonical(value.value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def coalition_list(mask: int) -> list[int]:
    return [i + 1 for i in range(mask.bit_length()) if mask >> i & 1]


def vec(values) -> str:
    return "(" + ", ".join(fmt(v) for v in values) + ")"


def table(rows: list[tuple[str, ...]], indent: str = "  ") -> list[str]:
    """Left-aligned columns."""
    if not rows:
        return []
    widths = [max(len(r[k]) for r in rows) for k in range(len(rows[0]))]
    return [indent + "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def game_table(g, indent: str = "  ") -> list[str]:
    return table([(label(m), fmt(g(m))) for m in range(1, g.grand + 1)], indent)


def format_report(report: Report, mode: str = "text") -> bytes:
    if mode == "machine":
        doc = {
            "command": report.command,
            "verdict": report.verdict,
            "exit_code": report.exit_code,
            "result": canonical(report.data),
        }
        if report.timing is not None:
            doc["timing_seconds"] = f"{report.timing:.6f}"
        return (json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    if mode != "text":
        raise ValueError(f"unknown format {mode!r}")
    out = [f"{report.command}: {report.verdict}"]
    out.extend(report.lines)
    if report.timing is not None:
        out.append(f"time: {report.timing:.6f} s")
    return ("\n".join(out) + "\n").encode("utf-8")
