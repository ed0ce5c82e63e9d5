"""Time series of correlation functions and their CSV/JSON representation."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


def chain_hash(chain) -> str:
    """Short content hash of a chain's canonical JSON."""
    return hashlib.sha256(chain.to_json().encode()).hexdigest()[:16]


def _temperature_token(T: float):
    return "inf" if math.isinf(T) else float(T)


@dataclass(frozen=True)
class CorrelationSeries:
    """Complex correlation <A(t) B(0)> sampled on an ascending time grid."""

    observable: str
    sites: tuple[int, ...]
    temperature: float
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if t.size != v.size:
            raise ValidationError(f"{t.size} times but {v.size} values")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValidationError("time grid must be strictly ascending")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))

    def __len__(self) -> int:
        return self.times.size

    def header(self, chain=None) -> dict:
        meta = {
            "observable": self.observable,
            "sites": list(self.sites),
            "temperature": _temperature_token(self.temperature),
        }
        if chain is not None:
            meta["chain_hash"] = chain_hash(chain)
        return meta

    def to_csv(self, chain=None) -> str:
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.header(chain), sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "re", "im"])
        for t, v in zip(self.times, self.values):
            w.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CorrelationSeries":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValidationError("missing JSON header line")
        meta = json.loads(lines[0][1:])
        rows = list(csv.reader(lines[2:]))
        times = [float(r[0]) for r in rows]
        values = [complex(float(r[1]), float(r[2])) for r in rows]
        T = meta["temperature"]
        return cls(meta["observable"], tuple(meta["sites"]), math.inf if T == "inf" else float(T), times, values)

    def to_dict(self, chain=None) -> dict:
        d = self.header(chain)
        d["t"] = [float(t) for t in self.times]
        d["re"] = [float(v.real) for v in self.values]
        d["im"] = [float(v.imag) for v in self.values]
        return d
