"""Pluggable per-tweet emotion classification.

The analytics layer only requires a callable mapping tweet text to one
of the five emotion categories or None (no clear emotional propensity).
The default implementation is a keyword-count classifier over a lexicon
file; any stronger model can be dropped in behind the same callable
interface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

__all__ = [
    "EMOTION_CATEGORIES",
    "EmotionClassifier",
    "LexiconEmotionClassifier",
    "load_emotion_lexicon",
]

EMOTION_CATEGORIES = ("anger", "disgust", "happiness", "sadness", "fear")

# Any callable with this shape can serve as the emotion component.
EmotionClassifier = Callable[[str], "str | None"]


@dataclass(frozen=True)
class LexiconEmotionClassifier:
    """Count keyword occurrences per category; unique positive argmax wins.

    Matching is casefolded substring counting (no word segmentation:
    lexicons mix Chinese and Latin terms). A tie for the maximum, or no
    hit at all, classifies the text as neutral (None).
    """

    lexicon: Mapping[str, tuple[str, ...]]

    def __post_init__(self) -> None:
        if set(self.lexicon) != set(EMOTION_CATEGORIES):
            raise ValueError(
                f"lexicon must map exactly the categories {EMOTION_CATEGORIES}, "
                f"got {sorted(self.lexicon)}"
            )
        for cat, words in self.lexicon.items():
            if not words or any(not w for w in words):
                raise ValueError(f"category {cat!r} must have non-empty keywords")

    def __call__(self, text: str) -> str | None:
        folded = text.casefold()
        best: str | None = None
        best_count = 0
        tied = False
        for cat in EMOTION_CATEGORIES:
            count = sum(folded.count(w) for w in self.lexicon[cat])
            if count > best_count:
                best, best_count, tied = cat, count, False
            elif count == best_count and count > 0:
                tied = True
        return None if tied or best_count == 0 else best


def load_emotion_lexicon(path: str | Path) -> LexiconEmotionClassifier:
    """Load a JSON object mapping the five category names to keyword arrays."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: expected a JSON object of category -> keywords")
    lexicon: dict[str, tuple[str, ...]] = {}
    for cat, words in raw.items():
        if not isinstance(words, list) or not all(isinstance(w, str) for w in words):
            raise ValueError(f"{path}: category {cat!r} must map to an array of strings")
        lexicon[cat] = tuple(w.casefold() for w in words)
    return LexiconEmotionClassifier(lexicon=lexicon)
