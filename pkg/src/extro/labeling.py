"""Score-distribution fit and 3-way extraversion labeling.

Self-report extraversion scores are modeled as a Gaussian; users scoring
more than half a standard deviation above the mean are labeled extrovert
(+1), more than half below introvert (-1), everything in between neutral
(0). Boundary scores are neutral (closed interval).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["EXTROVERT", "NEUTRAL", "INTROVERT", "LABELS", "ScoreModel", "fit_score_model", "label_score"]

EXTROVERT = 1
NEUTRAL = 0
INTROVERT = -1
LABELS = (INTROVERT, NEUTRAL, EXTROVERT)


@dataclass(frozen=True)
class ScoreModel:
    """Gaussian score model with derived labeling thresholds."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def lower(self) -> float:
        return self.mu - self.sigma / 2.0

    @property
    def upper(self) -> float:
        return self.mu + self.sigma / 2.0

    def to_dict(self) -> dict:
        return {"mu": self.mu, "sigma": self.sigma, "lower": self.lower, "upper": self.upper}


def fit_score_model(scores: Iterable[float]) -> ScoreModel:
    """Fit mean and population (divide-by-n) standard deviation.

    The divide-by-n convention is a recorded choice: the labeling rule
    only needs internal consistency, and reproductions must match.
    """
    xs: Sequence[float] = [float(s) for s in scores]
    if len(xs) < 2:
        raise ValueError(f"need at least 2 scores, got {len(xs)}")
    n = len(xs)
    mu = math.fsum(xs) / n
    var = math.fsum((x - mu) ** 2 for x in xs) / n
    if var == 0.0:
        raise ValueError("scores have zero variance")
    return ScoreModel(mu=mu, sigma=math.sqrt(var))


def label_score(score: float, model: ScoreModel) -> int:
    """Map a score to {-1, 0, 1}; scores on a threshold are neutral."""
    if score > model.upper:
        return EXTROVERT
    if score < model.lower:
        return INTROVERT
    return NEUTRAL
