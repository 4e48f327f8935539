"""Classifier training, cross-validation, and bulk classification.

Three model kinds are supported behind one interface: a C-SVM with RBF
kernel (one-vs-one multi-class, C=1, gamma=1/n_features unless
overridden), Gaussian Naive Bayes, and a seeded Random Forest. The
estimators themselves come from scikit-learn; everything that defines
the experiment contract (stratified fold construction, confusion
bookkeeping, macro F1, metric aggregation, artifact layout) is local.

Fold assignment derives from a seeded shuffle of the samples sorted by
user_id, so reordering the input changes nothing.
"""

from __future__ import annotations

import base64
import json
import pickle
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.naive_bayes import GaussianNB
from sklearn.svm import SVC

from .features import FeatureVector, apply_standardization
from .labeling import LABELS

__all__ = [
    "MODEL_KINDS",
    "Hyperparameters",
    "LabeledSample",
    "TrainedModel",
    "ConfusionMatrix",
    "CVReport",
    "train",
    "classify",
    "classify_batch",
    "macro_f1",
    "cross_validate",
    "save_model",
    "load_model",
]

MODEL_KINDS = ("random-forest", "naive-bayes", "svm-rbf")

_PICKLE_PROTOCOL = 4  # pinned so identical models serialize identically

_LABEL_INDEX = {label: i for i, label in enumerate(LABELS)}


@dataclass(frozen=True)
class Hyperparameters:
    svm_c: float = 1.0
    svm_gamma: float | None = None  # None: 1 / n_features
    rf_n_estimators: int = 100
    rf_max_depth: int | None = None

    def to_dict(self) -> dict:
        return {
            "svm_c": self.svm_c,
            "svm_gamma": self.svm_gamma,
            "rf_n_estimators": self.rf_n_estimators,
            "rf_max_depth": self.rf_max_depth,
        }

    @staticmethod
    def from_dict(d: Mapping) -> "Hyperparameters":
        return Hyperparameters(**d)


@dataclass(frozen=True)
class LabeledSample:
    features: FeatureVector
    label: int

    def __post_init__(self) -> None:
        if self.label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {self.label}")


@dataclass(frozen=True)
class TrainedModel:
    kind: str
    hyperparameters: Hyperparameters
    seed: int
    estimator: object = field(repr=False)
    registry_fingerprint: str = ""
    bounds: tuple[tuple[float, float], ...] | None = None


@dataclass(frozen=True)
class ConfusionMatrix:
    """3x3 counts indexed (true, predicted) over labels (-1, 0, 1)."""

    counts: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if len(self.counts) != 3 or any(len(r) != 3 for r in self.counts):
            raise ValueError("confusion matrix must be 3x3")
        if any(c < 0 for row in self.counts for c in row):
            raise ValueError("counts must be non-negative")

    @staticmethod
    def from_pairs(true: Sequence[int], predicted: Sequence[int]) -> "ConfusionMatrix":
        if len(true) != len(predicted):
            raise ValueError("true/predicted length mismatch")
        m = [[0, 0, 0] for _ in range(3)]
        for t, p in zip(true, predicted):
            m[_LABEL_INDEX[t]][_LABEL_INDEX[p]] += 1
        return ConfusionMatrix(counts=tuple(tuple(r) for r in m))

    def add(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(
            counts=tuple(
                tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.counts, other.counts)
            )
        )

    @property
    def total(self) -> int:
        return sum(c for row in self.counts for c in row)

    @property
    def accuracy(self) -> float:
        if self.total == 0:
            raise ValueError("empty confusion matrix")
        return sum(self.counts[i][i] for i in range(3)) / self.total

    def recall(self, label: int) -> float:
        i = _LABEL_INDEX[label]
        row = sum(self.counts[i])
        return self.counts[i][i] / row if row else 0.0

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.counts]


def macro_f1(c: ConfusionMatrix) -> float:
    """Unweighted mean over the three labels of 2tp / (2tp + fp + fn).

    The single-division form is the harmonic precision/recall mean and
    makes the value exactly 1.0 iff the matrix is diagonal (no rounding
    ambiguity); a class with no true positives contributes 0.
    """
    if c.total == 0:
        raise ValueError("empty confusion matrix")
    scores = []
    for i in range(3):
        tp = c.counts[i][i]
        fn = sum(c.counts[i]) - tp
        fp = sum(c.counts[r][i] for r in range(3)) - tp
        denom = 2 * tp + fp + fn
        scores.append(2 * tp / denom if denom else 0.0)
    return sum(scores) / 3


def _as_matrix(samples: Sequence[LabeledSample]) -> tuple[np.ndarray, np.ndarray]:
    if not samples:
        raise ValueError("no samples")
    widths = {len(s.features.values) for s in samples}
    if len(widths) != 1:
        raise ValueError(f"inconsistent feature widths {sorted(widths)}")
    x = np.asarray([s.features.values for s in samples], dtype=float)
    y = np.asarray([s.label for s in samples], dtype=int)
    return x, y


def _validate_training_set(x: np.ndarray, y: np.ndarray) -> None:
    missing = [label for label in LABELS if not (y == label).any()]
    if missing:
        raise ValueError(f"missing class(es) {missing}; need at least 1 sample per class")
    if x.min() < 0.0 or x.max() > 1.0:
        raise ValueError("features must be standardized into [0, 1] before training")


def _make_estimator(kind: str, n_features: int, hp: Hyperparameters, seed: int):
    if kind == "svm-rbf":
        gamma = hp.svm_gamma if hp.svm_gamma is not None else 1.0 / n_features
        return SVC(C=hp.svm_c, kernel="rbf", gamma=gamma)
    if kind == "naive-bayes":
        return GaussianNB()
    if kind == "random-forest":
        return RandomForestClassifier(
            n_estimators=hp.rf_n_estimators,
            max_depth=hp.rf_max_depth,
            random_state=seed,
            n_jobs=1,
        )
    raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


def train(
    kind: str,
    samples: Sequence[LabeledSample],
    hyperparameters: Hyperparameters | None = None,
    seed: int = 0,
    registry_fingerprint: str = "",
    bounds: Sequence[tuple[float, float]] | None = None,
) -> TrainedModel:
    """Fit one estimator on standardized samples.

    ``bounds`` are the stored per-feature (min, max) pairs; when given,
    classify() scales raw inputs with them (clipped into [0, 1]), when
    None inputs are assumed standardized already and only clipped.
    """
    hp = hyperparameters or Hyperparameters()
    x, y = _as_matrix(samples)
    _validate_training_set(x, y)
    estimator = _make_estimator(kind, x.shape[1], hp, seed)
    estimator.fit(x, y)
    return TrainedModel(
        kind=kind,
        hyperparameters=hp,
        seed=seed,
        estimator=estimator,
        registry_fingerprint=registry_fingerprint,
        bounds=tuple((float(a), float(b)) for a, b in bounds) if bounds is not None else None,
    )


def _prepare_inputs(model: TrainedModel, values: np.ndarray) -> np.ndarray:
    if model.bounds is not None:
        return apply_standardization(values, model.bounds)
    return np.clip(np.atleast_2d(values), 0.0, 1.0)


def classify_batch(
    model: TrainedModel,
    vectors: Sequence[FeatureVector],
    registry_fingerprint: str | None = None,
) -> list[int]:
    """Predict labels for many vectors; checks the registry fingerprint."""
    if (
        registry_fingerprint is not None
        and model.registry_fingerprint
        and registry_fingerprint != model.registry_fingerprint
    ):
        raise ValueError(
            "registry fingerprint mismatch: model was trained on a different feature layout"
        )
    if not vectors:
        return []
    x = np.asarray([v.values for v in vectors], dtype=float)
    prepared = _prepare_inputs(model, x)
    return [int(p) for p in model.estimator.predict(prepared)]


def classify(
    model: TrainedModel, v: FeatureVector, registry_fingerprint: str | None = None
) -> int:
    """Predict one label in {-1, 0, 1}."""
    return classify_batch(model, [v], registry_fingerprint)[0]


@dataclass(frozen=True)
class CVReport:
    kind: str
    n_folds: int
    seed: int
    fold_confusions: tuple[ConfusionMatrix, ...]

    @property
    def summed_confusion(self) -> ConfusionMatrix:
        total = self.fold_confusions[0]
        for c in self.fold_confusions[1:]:
            total = total.add(c)
        return total

    def _metrics(self, c: ConfusionMatrix) -> dict[str, float]:
        return {
            "overall_accuracy": c.accuracy,
            "extrovert_recall": c.recall(1),
            "introvert_recall": c.recall(-1),
            "macro_f1": macro_f1(c),
        }

    @property
    def aggregate(self) -> dict[str, float]:
        """Metrics of the summed (pooled) confusion matrix."""
        return self._metrics(self.summed_confusion)

    @property
    def fold_mean(self) -> dict[str, float]:
        """Per-fold metrics averaged over folds (the other common convention)."""
        per_fold = [self._metrics(c) for c in self.fold_confusions]
        return {k: sum(m[k] for m in per_fold) / len(per_fold) for k in per_fold[0]}

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_folds": self.n_folds,
            "seed": self.seed,
            "fold_confusions": [c.to_json() for c in self.fold_confusions],
            "summed_confusion": self.summed_confusion.to_json(),
            "aggregate": self.aggregate,
            "fold_mean": self.fold_mean,
        }


def cross_validate(
    kind: str,
    samples: Sequence[LabeledSample],
    k: int = 10,
    seed: int = 0,
    hyperparameters: Hyperparameters | None = None,
) -> CVReport:
    """Stratified k-fold cross-validation with a seeded shuffle.

    Samples are first put in canonical order (sorted by user_id), then
    shuffled by the seed, then dealt round-robin per class into folds;
    input order therefore cannot influence the result.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    ordered = sorted(samples, key=lambda s: s.features.user_id)
    rng = random.Random(seed)
    rng.shuffle(ordered)
    by_class: dict[int, list[int]] = {label: [] for label in LABELS}
    for i, s in enumerate(ordered):
        by_class[s.label].append(i)
    for label, idx in by_class.items():
        if len(idx) < k:
            raise ValueError(f"class {label} has {len(idx)} samples, fewer than {k} folds")
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in LABELS:
        for j, i in enumerate(by_class[label]):
            folds[j % k].append(i)
    confusions: list[ConfusionMatrix] = []
    for fold in folds:
        held = set(fold)
        train_samples = [s for i, s in enumerate(ordered) if i not in held]
        model = train(kind, train_samples, hyperparameters, seed=seed)
        test_samples = [ordered[i] for i in fold]
        predicted = classify_batch(model, [s.features for s in test_samples])
        confusions.append(
            ConfusionMatrix.from_pairs([s.label for s in test_samples], predicted)
        )
    return CVReport(kind=kind, n_folds=k, seed=seed, fold_confusions=tuple(confusions))


def _model_payload(model: TrainedModel) -> dict:
    return {
        "format": "extro-model",
        "version": 1,
        "kind": model.kind,
        "seed": model.seed,
        "hyperparameters": model.hyperparameters.to_dict(),
        "registry_fingerprint": model.registry_fingerprint,
        "bounds": [list(b) for b in model.bounds] if model.bounds is not None else None,
        "estimator_b64": base64.b64encode(
            pickle.dumps(model.estimator, protocol=_PICKLE_PROTOCOL)
        ).decode("ascii"),
    }


def serialize_model(model: TrainedModel) -> bytes:
    return (
        json.dumps(_model_payload(model), ensure_ascii=False, sort_keys=True, indent=2) + "\n"
    ).encode("utf-8")


def save_model(model: TrainedModel, path: str | Path) -> None:
    Path(path).write_bytes(serialize_model(model))


def load_model(path: str | Path) -> TrainedModel:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != "extro-model":
        raise ValueError(f"{path}: not a model artifact")
    return TrainedModel(
        kind=payload["kind"],
        hyperparameters=Hyperparameters.from_dict(payload["hyperparameters"]),
        seed=payload["seed"],
        estimator=pickle.loads(base64.b64decode(payload["estimator_b64"])),
        registry_fingerprint=payload["registry_fingerprint"],
        bounds=tuple(tuple(b) for b in payload["bounds"]) if payload["bounds"] is not None else None,
    )
