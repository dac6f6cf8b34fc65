"""Duel transcripts: an ordered event log that can be saved, reported and replayed."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

from ..numeric import encode

EVENT_TYPES = ("expose", "respond", "decide", "certify")
CSV_COLUMNS = ("step", "event", "bound", "measured", "pass")


@dataclass
class DuelTranscript:
    adversary: str
    embedder: str
    params: dict[str, Any] = field(default_factory=dict)
    embedder_params: dict[str, Any] = field(default_factory=dict)
    events: list[dict[str, Any]] = field(default_factory=list)
    report: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def begin(cls, existing, adversary: str, embedder: str, params: dict[str, Any]) -> "DuelTranscript":
        """Fill in ``existing`` (kept by the caller so it survives an aborted duel) or make a new one."""
        if existing is None:
            return cls(adversary, embedder, params)
        existing.adversary, existing.embedder = adversary, embedder
        existing.params = {**params, **existing.params}
        return existing

    def expose(self, step: int, point: int, dists, label=None) -> None:
        ev = {"type": "expose", "step": step, "point": point, "dists": [encode(x) for x in dists]}
        if label is not None:
            ev["label"] = label
        self.events.append(ev)

    def respond(self, step: int, point: int, response: dict[str, Any]) -> None:
        self.events.append({"type": "respond", "step": step, "point": point, "response": response})

    def decide(self, step: int, **decision) -> None:
        self.events.append({"type": "decide", "step": step, **{k: _enc(v) for k, v in decision.items()}})

    def certify(self, step: int, name: str, bound, measured, passed: bool, **extra) -> bool:
        self.events.append(
            {
                "type": "certify",
                "step": step,
                "name": name,
                "bound": _enc(bound),
                "measured": _enc(measured),
                "pass": bool(passed),
                **{k: _enc(v) for k, v in extra.items()},
            }
        )
        return bool(passed)

    def certificates(self) -> list[dict[str, Any]]:
        return [e for e in self.events if e["type"] == "certify"]

    @property
    def passed(self) -> bool:
        return all(e["pass"] for e in self.certificates())

    def exposures(self) -> list[dict[str, Any]]:
        return [e for e in self.events if e["type"] == "expose"]

    def responses(self) -> list[dict[str, Any]]:
        return [e for e in self.events if e["type"] == "respond"]

    def to_json(self) -> dict[str, Any]:
        return {
            "adversary": self.adversary,
            "embedder": self.embedder,
            "params": self.params,
            "embedder_params": self.embedder_params,
            "events": self.events,
            "report": self.report,
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "DuelTranscript":
        for key in ("adversary", "embedder", "events"):
            if key not in obj:
                raise ValueError(f"malformed transcript: missing {key!r}")
        for ev in obj["events"]:
            if ev.get("type") not in EVENT_TYPES or "step" not in ev:
                raise ValueError(f"malformed transcript event: {ev!r}")
        return cls(
            obj["adversary"],
            obj["embedder"],
            obj.get("params", {}),
            obj.get("embedder_params", {}),
            obj["events"],
            obj.get("report", {}),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "DuelTranscript":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def csv_rows(self) -> list[dict[str, Any]]:
        """One row per event; bound/measured/pass are blank except for certificates."""
        rows = []
        for ev in self.events:
            cert = ev["type"] == "certify"
            rows.append(
                {
                    "step": ev["step"],
                    "event": ev["type"] if not cert else f"certify:{ev['name']}",
                    "bound": ev.get("bound", "") if cert else "",
                    "measured": ev.get("measured", "") if cert else "",
                    "pass": ev["pass"] if cert else "",
                }
            )
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.csv_rows())
        return buf.getvalue()


def _enc(v):
    if isinstance(v, (list, tuple)):
        return [_enc(x) for x in v]
    if isinstance(v, dict):
        return {k: _enc(x) for k, x in v.items()}
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v
    return encode(v)
