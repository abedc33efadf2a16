"""Threshold-sweep reports for the reject models."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields
from typing import List, Sequence

import numpy as np

DEFAULT_T = tuple(k / 10 for k in range(11))
DEFAULT_T1 = (0.80, 0.90, 0.95)
DEFAULT_T2 = (0.0, 0.3, 0.6, 0.9)


@dataclass(frozen=True)
class RegressionRow:
    """Absolute-loss statistics over samples with ``phi_f >= threshold``.

    ``bucket_count`` counts samples with ``threshold <= phi_f < next
    threshold`` (the last bucket is open-ended), so with a grid starting at
    0 the bucket counts sum to the evaluation-set size.
    """

    threshold: float
    accepted: int
    bucket_count: int
    mean: float
    min: float
    q1: float
    median: float
    q3: float
    max: float


@dataclass(frozen=True)
class ClassificationRow:
    """G1 = confident and in-distribution, G2 = confident but low tree score.

    Proportions are relative to the confident samples (``phi_m >= t1``);
    empty groups report NaN accuracy and confidence.
    """

    t1: float
    t2: float
    n_confident: int
    g1_count: int
    g1_proportion: float
    g1_accuracy: float
    g1_phi_m: float
    g2_count: int
    g2_proportion: float
    g2_accuracy: float
    g2_phi_m: float


@dataclass(frozen=True)
class RejectReport:
    kind: str
    rows: tuple

    def to_csv(self) -> str:
        if not self.rows:
            return ""
        buf = io.StringIO()
        names = [f.name for f in fields(self.rows[0])]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(names)
        for row in self.rows:
            writer.writerow([_fmt_csv(getattr(row, n)) for n in names])
        return buf.getvalue()

    def to_table(self) -> str:
        if self.kind == "regression":
            head = f"{'t':>5} {'n':>6} {'mean':>9} {'min':>9} {'q1':>9} {'median':>9} {'q3':>9} {'max':>9}"
            lines = [head]
            for r in self.rows:
                stats = " ".join(f"{_fmt(v):>9}" for v in (r.mean, r.min, r.q1, r.median, r.q3, r.max))
                lines.append(f"{r.threshold:5.2f} {r.accepted:6d} {stats}")
            return "\n".join(lines) + "\n"
        lines = [
            f"{'t1':>4} {'t2':>4} | {'G1 prop':>7} {'acc':>6} {'phi_M':>6} | {'G2 prop':>7} {'acc':>6} {'phi_M':>6}"
        ]
        for r in self.rows:
            lines.append(
                f"{r.t1:4.2f} {r.t2:4.2f} | {_fmt(r.g1_proportion, 2):>7} {_fmt(r.g1_accuracy):>6} "
                f"{_fmt(r.g1_phi_m):>6} | {_fmt(r.g2_proportion, 2):>7} {_fmt(r.g2_accuracy):>6} "
                f"{_fmt(r.g2_phi_m):>6}"
            )
        return "\n".join(lines) + "\n"

    def as_dicts(self) -> List[dict]:
        return [asdict(r) for r in self.rows]


def _fmt(v, digits=3) -> str:
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    return f"{v:.{digits}f}"


def _fmt_csv(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def regression_report(phi_f, y_true, y_pred, thresholds: Sequence[float] = DEFAULT_T) -> RejectReport:
    phi_f = np.asarray(phi_f, dtype=float)
    loss = np.abs(np.asarray(y_true, dtype=float) - np.asarray(y_pred, dtype=float))
    ts = sorted(float(t) for t in thresholds)
    rows = []
    for i, t in enumerate(ts):
        accepted = loss[phi_f >= t]
        upper = ts[i + 1] if i + 1 < len(ts) else math.inf
        bucket = int(np.count_nonzero((phi_f >= t) & (phi_f < upper)))
        if accepted.size:
            q = np.quantile(accepted, [0.0, 0.25, 0.5, 0.75, 1.0])
            stats = (float(accepted.mean()), *(float(v) for v in q))
        else:
            stats = (math.nan,) * 6
        mean, lo, q1, med, q3, hi = stats
        rows.append(RegressionRow(t, int(accepted.size), bucket, mean, lo, q1, med, q3, hi))
    return RejectReport("regression", tuple(rows))


def _group(mask, correct, phi_m, n_confident):
    count = int(np.count_nonzero(mask))
    prop = count / n_confident if n_confident else math.nan
    if count == 0:
        return count, prop, math.nan, math.nan
    return count, prop, float(correct[mask].mean()), float(phi_m[mask].mean())


def classification_report(
    phi_f,
    phi_m,
    y_true,
    y_pred,
    t1_values: Sequence[float] = DEFAULT_T1,
    t2_values: Sequence[float] = DEFAULT_T2,
) -> RejectReport:
    phi_f = np.asarray(phi_f, dtype=float)
    phi_m = np.asarray(phi_m, dtype=float)
    correct = np.asarray(y_true) == np.asarray(y_pred)
    rows = []
    for t1 in t1_values:
        confident = phi_m >= t1
        n_conf = int(np.count_nonzero(confident))
        for t2 in t2_values:
            g1 = confident & (phi_f >= t2)
            g2 = confident & (phi_f < t2)
            rows.append(
                ClassificationRow(
                    float(t1), float(t2), n_conf,
                    *_group(g1, correct, phi_m, n_conf),
                    *_group(g2, correct, phi_m, n_conf),
                )
            )
    return RejectReport("classification", tuple(rows))
