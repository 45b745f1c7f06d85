"""Plain-text reports with a JSON sidecar and CSV attachments."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .criteria import Conclusion, Verdict
from .domains import INFINITY

__all__ = ["Entry", "Report", "fmt", "plain"]


def _num(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = format(x, ".12g")
    return "0" if s == "-0" else s


def fmt(v) -> str:
    """Fixed 12-significant-digit rendering used in every report."""
    p = plain(v)
    if isinstance(p, str):
        return p
    return json.dumps(p, sort_keys=True)


def plain(v):
    """Convert evidence values to JSON-compatible data with formatted numbers."""
    if v is None or isinstance(v, (bool, str)):
        return v
    if v is INFINITY:
        return "inf"
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, Conclusion):
        return v.value
    if isinstance(v, Verdict):
        return {"conclusion": v.conclusion.value, "citation": v.citation,
                "caveat": v.caveat, "evidence": plain(v.evidence)}
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return _num(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        z = complex(v)
        re, im = _num(z.real), _num(abs(z.imag))
        if im == "0":
            return re
        sign = "-" if z.imag < 0 else "+"
        return f"{re}{sign}{im}i" if re != "0" else f"{'-' if sign == '-' else ''}{im}i"
    if isinstance(v, dict):
        return {str(k): plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [plain(x) for x in v]
    return str(v)


@dataclass
class Entry:
    name: str
    verdict: Optional[Verdict] = None
    info: dict = field(default_factory=dict)

    @property
    def conclusion(self) -> str:
        return self.verdict.conclusion.value if self.verdict else "-"

    @property
    def citation(self) -> str:
        return self.verdict.citation if self.verdict else ""


@dataclass
class Report:
    title: str
    scenario: dict
    entries: list = field(default_factory=list)
    csvs: dict = field(default_factory=dict)
    headline: Optional[str] = None
    exit_status: int = 0

    def add(self, name: str, verdict: Optional[Verdict] = None, **info) -> Entry:
        e = Entry(name, verdict, info)
        self.entries.append(e)
        return e

    def entry(self, name: str) -> Entry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def final(self) -> Optional[Entry]:
        if self.headline is not None:
            return self.entry(self.headline)
        for e in self.entries:
            if e.verdict is not None and e.verdict.is_obstruction:
                return e
        return next((e for e in self.entries if e.verdict is not None), None)

    def conclusions(self) -> list:
        """(check, conclusion, citation) triples: the golden-comparison fields."""
        return [(e.name, e.conclusion, e.citation) for e in self.entries if e.verdict]

    def render(self) -> str:
        lines = [f"supercyc {__version__} report: {self.title}",
                 "scenario: " + json.dumps(plain(self.scenario), sort_keys=True), ""]
        for k, e in enumerate(self.entries, 1):
            head = f"[{k}] {e.name}"
            if e.verdict is not None:
                head += f": {e.verdict}"
            lines.append(head)
            if e.verdict is not None and e.verdict.caveat:
                lines.append(f"    caveat: {e.verdict.caveat}")
            ev = dict(e.verdict.evidence) if e.verdict is not None else {}
            ev.update(e.info)
            for key in sorted(ev):
                lines.append(f"    {key}: {fmt(ev[key])}")
        lines.append("")
        fin = self.final
        if fin is None or fin.verdict is None:
            lines.append("verdict: Inconclusive")
        else:
            lines.append(f"verdict: {fin.verdict} ({fin.name})")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        fin = self.final
        return {
            "tool": "supercyc", "version": __version__, "title": self.title,
            "scenario": plain(self.scenario),
            "entries": [{"check": e.name,
                         "verdict": plain(e.verdict) if e.verdict else None,
                         "info": plain(e.info)} for e in self.entries],
            "final": {"check": fin.name, "conclusion": fin.conclusion,
                      "citation": fin.citation} if fin else None,
            "csv": sorted(self.csvs),
            "exitStatus": self.exit_status,
        }

    def write(self, out_dir, stem: str = "report") -> list:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = [out / f"{stem}.txt", out / f"{stem}.json"]
        written[0].write_text(self.render())
        written[1].write_text(json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n")
        for name in sorted(self.csvs):
            p = out / name
            p.write_text(self.csvs[name])
            written.append(p)
        return written
