"""Per-run metric record shared by the learner and the benchmark harness."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class RunMetrics:
    """Accounting and accuracy for one learner run.

    Learners fill the CI-test fields; precision/recall/f1 stay NaN until a
    caller with access to the truth graph scores the output.
    """

    n_tests: int = 0
    asc: float = 0.0
    max_cond: int = 0
    precision: float = float("nan")
    recall: float = float("nan")
    f1: float = float("nan")
    wall_ms: float = 0.0
    warnings: int = 0
