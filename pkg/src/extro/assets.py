"""Loaders for the shipped default asset files.

Every asset is a replaceable file; these helpers only resolve the
defaults packaged under extro/assets. Pipelines can point at their own
files instead via configuration.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .analytics import load_buying_keywords, load_source_map
from .emotion import LexiconEmotionClassifier, load_emotion_lexicon
from .features import TermLexicon, load_term_lexicon

__all__ = [
    "asset_path",
    "default_term_lexicon",
    "default_buying_keywords",
    "default_emotion_classifier",
    "default_source_map",
]

_ASSET_NAMES = (
    "personality_terms.txt",
    "buying_keywords.txt",
    "emotion_lexicon.json",
    "source_map.json",
)


def asset_path(name: str) -> Path:
    """Filesystem path of a shipped asset (the package installs unzipped)."""
    if name not in _ASSET_NAMES:
        raise ValueError(f"unknown asset {name!r}; shipped assets: {_ASSET_NAMES}")
    return Path(str(resources.files("extro").joinpath("assets").joinpath(name)))


def default_term_lexicon() -> TermLexicon:
    return load_term_lexicon(asset_path("personality_terms.txt"))


def default_buying_keywords() -> tuple[str, ...]:
    return load_buying_keywords(asset_path("buying_keywords.txt"))


def default_emotion_classifier() -> LexiconEmotionClassifier:
    return load_emotion_lexicon(asset_path("emotion_lexicon.json"))


def default_source_map() -> dict[str, str]:
    return load_source_map(asset_path("source_map.json"))
