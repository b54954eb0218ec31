"""Verdict and witness records for sampled and exact criterion checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PASS = "pass"
VIOLATION = "violation"
INCONCLUSIVE = "inconclusive"
PRECONDITION_FAILED = "precondition_failed"


def _to_jsonable(x):
    if isinstance(x, np.ndarray):
        return [_to_jsonable(v) for v in x.tolist()] if x.ndim else _to_jsonable(x.item())
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, (list, tuple)):
        return [_to_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {k: _to_jsonable(v) for k, v in x.items()}
    return x


@dataclass
class Witness:
    """The sample realizing the worst margin of a check."""

    vectors: dict = field(default_factory=dict)
    margin: float = float("inf")
    index: int | None = None
    t: float | None = None
    theta: float | None = None

    def to_dict(self) -> dict:
        d = {"margin": self.margin, "index": self.index}
        if self.t is not None:
            d["t"] = self.t
        if self.theta is not None:
            d["theta"] = self.theta
        d["vectors"] = {k: _to_jsonable(v) for k, v in self.vectors.items()}
        return d


@dataclass
class Verdict:
    """Outcome of a check: pass / violation / inconclusive, plus margins."""

    status: str
    margin: float
    samples: int = 0
    witness: Witness | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == PASS

    @property
    def decided(self) -> bool:
        return self.status in (PASS, VIOLATION)

    def to_dict(self) -> dict:
        d = {
            "status": self.status,
            "margin": self.margin,
            "samples": self.samples,
            "notes": list(self.notes),
        }
        if self.witness is not None:
            d["witness"] = self.witness.to_dict()
        return d


def from_margins(
    margins: np.ndarray,
    tol_scaled: np.ndarray | float,
    samples: int,
    witness_fn=None,
    notes: list[str] | None = None,
    inconclusive_band: float = 0.0,
) -> Verdict:
    """Reduce per-sample margins (>= 0 means the inequality holds) to a verdict.

    ``witness_fn(worst_index)`` builds the witness lazily for the worst sample.
    With a nonzero ``inconclusive_band``, violations smaller than the band are
    reported inconclusive instead of failed.
    """
    margins = np.asarray(margins, dtype=float)
    rel = margins + np.asarray(tol_scaled, dtype=float)
    worst = int(np.argmin(rel))
    worst_margin = float(margins.flat[worst] if margins.ndim else margins)
    notes = list(notes or [])
    if np.all(rel >= 0.0):
        status = PASS
        witness = None
    elif inconclusive_band > 0.0 and margins.flat[worst] > -inconclusive_band:
        status = INCONCLUSIVE
        witness = witness_fn(worst) if witness_fn else None
        notes.append("violation below decision band")
    else:
        status = VIOLATION
        witness = witness_fn(worst) if witness_fn else None
    v = Verdict(status=status, margin=worst_margin, samples=samples, witness=witness, notes=notes)
    return v
