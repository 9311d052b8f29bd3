"""Verdict records and the residual scanner shared by every identity check."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

PASS = "pass"
FAIL = "fail"
INFO = "info"
SKIP = "skip"


@dataclass
class Verdict:
    tag: str
    holds: bool | None
    status: str
    witness: str | None = None
    note: str | None = None
    value: str | None = None

    def to_dict(self) -> dict:
        out = {"holds": self.holds, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.value is not None:
            out["value"] = self.value
        if self.note is not None:
            out["note"] = self.note
        return out


@dataclass
class StructureReport:
    verdicts: dict[str, Verdict] = field(default_factory=dict)

    def add(self, verdict: Verdict) -> Verdict:
        self.verdicts[verdict.tag] = verdict
        return verdict

    def merge(self, other: StructureReport) -> None:
        self.verdicts.update(other.verdicts)

    def __getitem__(self, tag: str) -> Verdict:
        return self.verdicts[tag]

    def __contains__(self, tag: str) -> bool:
        return tag in self.verdicts

    def __iter__(self) -> Iterator[Verdict]:
        return iter(self.verdicts.values())

    def failures(self) -> list[Verdict]:
        return [v for v in self if v.status == FAIL]

    @property
    def ok(self) -> bool:
        return not self.failures()


def _nonzero_entries(value, label: str):
    if isinstance(value, np.ndarray):
        for idx in np.ndindex(value.shape):
            if value[idx] != 0:
                yield f"{label}[{','.join(str(i + 1) for i in idx)}]", value[idx]
    elif value != 0:
        yield label, value


def first_witness(residuals: Iterable[tuple[str, object]]) -> str | None:
    """Describe the first nonzero residual component, or None if all vanish."""
    for label, value in residuals:
        for where, entry in _nonzero_entries(value, label):
            return f"{where} = {entry}"
    return None


def verdict_from_residuals(tag: str, residuals, *, informational: bool = False, note: str | None = None) -> Verdict:
    witness = first_witness(residuals)
    holds = witness is None
    if informational:
        status = INFO
    else:
        status = PASS if holds else FAIL
    return Verdict(tag, holds, status, witness, note)


def boolean_verdict(tag: str, holds: bool, *, witness: str | None = None, informational: bool = False,
                    note: str | None = None, value: str | None = None) -> Verdict:
    status = INFO if informational else (PASS if holds else FAIL)
    return Verdict(tag, holds, status, None if holds else witness, note, value)


def skipped(tag: str, note: str) -> Verdict:
    return Verdict(tag, None, SKIP, None, note)
