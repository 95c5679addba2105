"""Per-subject scoring and paired statistics.

The benchmark metric: Pearson correlation per non-overlapping window, meaned
per subject, then summarized across subjects (mean and n-1 standard
deviation). Significance between two models uses the two-sided Wilcoxon
signed-rank test on paired per-subject scores plus Cohen's d on the
differences.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..dsp import pearson


@dataclass
class SubjectScore:
    subject_id: str
    rho: float
    n_windows: int


@dataclass
class EvalReport:
    model_name: str
    mode: str
    per_subject: list = field(default_factory=list)
    mean_rho: float = 0.0
    std_rho: float = 0.0
    param_count: int = 0
    relative_gain_pct: float = None  # vs the linear baseline; None for itself

    def subject_scores(self) -> dict:
        return {s.subject_id: s.rho for s in self.per_subject}


def score_decodes(decodes, model_name: str = "", mode: str = "",
                  param_count: int = 0) -> EvalReport:
    """Window rho -> per-subject mean -> across-subject mean and std (ddof 1)."""
    by_subject = {}
    for d in decodes:
        by_subject.setdefault(d.subject_id, []).extend(
            pearson(w.output, w.target) for w in d.windows)
    report = EvalReport(model_name=model_name, mode=mode, param_count=param_count)
    for subject_id in sorted(by_subject):
        rhos = by_subject[subject_id]
        if not rhos:
            warnings.warn(f"subject {subject_id} has no scored windows; excluded")
            continue
        report.per_subject.append(
            SubjectScore(subject_id, float(np.mean(rhos)), len(rhos)))
    if not report.per_subject:
        raise ValueError("no subjects with scored windows")
    values = [s.rho for s in report.per_subject]
    report.mean_rho = float(np.mean(values))
    report.std_rho = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return report


def relative_gain_pct(rho_model: float, rho_baseline: float) -> float:
    return (rho_model - rho_baseline) / rho_baseline * 100.0


def _exact_wilcoxon_p(ranks, w_plus: float) -> float:
    """Exact two-sided p: enumerate the 2^n sign patterns via subset-sum DP.

    Midranks may be half-integers under ties, so rank sums are doubled to
    stay on an integer lattice; the enumeration remains exact conditional on
    the observed |differences|.
    """
    ranks2 = np.rint(2.0 * np.asarray(ranks)).astype(int)
    counts = np.zeros(int(ranks2.sum()) + 1)
    counts[0] = 1.0
    for r in ranks2:
        counts[r:] += counts[:-r].copy()  # copy: slices overlap
    n_patterns = counts.sum()
    w = int(round(2.0 * w_plus))
    lower = counts[: w + 1].sum() / n_patterns
    upper = counts[w:].sum() / n_patterns
    return float(min(1.0, 2.0 * min(lower, upper)))


def _normal_wilcoxon_p(ranks, w_plus: float) -> float:
    """Normal approximation with continuity correction and tie correction."""
    n = len(ranks)
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var -= float(np.sum(tie_counts ** 3 - tie_counts)) / 48.0
    if var <= 0:
        return 1.0
    dev = w_plus - mean
    dev -= 0.5 * np.sign(dev)  # continuity correction toward the mean
    z = dev / math.sqrt(var)
    return float(min(1.0, 2.0 * (1.0 - 0.5 * (1.0 + math.erf(abs(z) / math.sqrt(2))))))


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def wilcoxon_signed_rank(diffs) -> float:
    """Two-sided signed-rank p-value; exact sign-pattern enumeration for
    n <= 25, normal approximation with continuity correction otherwise.
    Zero differences are dropped first."""
    d = np.asarray(diffs, dtype=np.float64)
    d = d[d != 0.0]
    if d.size == 0:
        return 1.0
    ranks = _midranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    if d.size <= 25:
        return _exact_wilcoxon_p(ranks, w_plus)
    return _normal_wilcoxon_p(ranks, w_plus)


def cohens_d(diffs) -> float:
    """mean(diffs) / std(diffs, ddof=1); 0 when every difference is zero."""
    d = np.asarray(diffs, dtype=np.float64)
    if np.all(d == 0.0):
        return 0.0
    sd = float(np.std(d, ddof=1))
    if sd == 0.0:
        return math.inf if d.mean() > 0 else -math.inf
    return float(d.mean() / sd)


def paired_stats(scores_a, scores_b):
    """(p_value, cohens_d) for paired per-subject score lists (a minus b)."""
    a = np.asarray(scores_a, dtype=np.float64)
    b = np.asarray(scores_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"paired_stats: shapes differ {a.shape} vs {b.shape}")
    if a.size < 5:
        raise ValueError(f"paired_stats: need >= 5 pairs, got {a.size}")
    diffs = a - b
    return wilcoxon_signed_rank(diffs), cohens_d(diffs)
