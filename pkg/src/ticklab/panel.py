"""Per-instrument before/after differences and one-sided paired t-tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import special

from .errors import (
    InsufficientDataError,
    PanelMismatchError,
    ParameterError,
    ZeroVarianceError,
)
from .validation import as_float_array

ALTERNATIVES = ("greater", "less")


@dataclass(frozen=True)
class PanelDifference:
    """Paired before/after statistic values across instruments."""

    labels: tuple
    before: np.ndarray
    after: np.ndarray
    differences: np.ndarray
    statistic: str = ""

    def __post_init__(self):
        before = as_float_array(self.before, "before")
        after = as_float_array(self.after, "after")
        differences = as_float_array(self.differences, "differences")
        if not (len(self.labels) == before.size == after.size == differences.size):
            raise ParameterError("panel fields must have equal length")
        for arr in (before, after, differences):
            arr.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "before", before)
        object.__setattr__(self, "after", after)
        object.__setattr__(self, "differences", differences)

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class TTestResult:
    t_stat: float
    p_value: float
    dof: int
    direction: str  # the one-sided alternative that was tested


def build_panel(
    before: Mapping[str, float], after: Mapping[str, float], statistic: str = ""
) -> PanelDifference:
    """Pair per-instrument values; instruments are ordered alphabetically."""
    missing = set(before) ^ set(after)
    if missing:
        raise PanelMismatchError(
            f"instrument sets differ between windows: {sorted(missing)}"
        )
    labels = tuple(sorted(before))
    b = np.array([before[k] for k in labels], dtype=np.float64)
    a = np.array([after[k] for k in labels], dtype=np.float64)
    return PanelDifference(
        labels=labels, before=b, after=a, differences=a - b, statistic=statistic
    )


def paired_one_sided_ttest(
    panel: PanelDifference, alternative: str = "greater"
) -> TTestResult:
    """One-sample t-test of the mean paired difference against zero.

    alternative="greater" reports P(T_{n-1} >= t), the evidence that the
    mean difference is positive; alternative="less" reports the lower
    tail.  The Student-t tail is evaluated through the regularized
    incomplete beta function (scipy.special.stdtr).
    """
    if alternative not in ALTERNATIVES:
        raise ParameterError(f"alternative must be one of {ALTERNATIVES}")
    d = panel.differences
    if d.size < 2:
        raise InsufficientDataError("a paired t-test needs at least 2 differences")
    s = float(d.std(ddof=1))
    if s == 0.0:
        raise ZeroVarianceError("differences have zero variance")
    dof = d.size - 1
    t = float(d.mean()) / (s / math.sqrt(d.size))
    if alternative == "greater":
        p = float(special.stdtr(dof, -t))
    else:
        p = float(special.stdtr(dof, t))
    return TTestResult(t_stat=t, p_value=p, dof=dof, direction=alternative)
