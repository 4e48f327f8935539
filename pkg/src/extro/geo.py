"""Offline reverse geocoding and POI categorization.

A Gazetteer maps a coordinate to the nearest city/county whose own
radius covers it; a PoiIndex maps a coordinate to the category of the
nearest point of interest within a fixed search radius. Both resolve
ties by smaller distance, then lexicographically smaller entry name,
so results are deterministic.

Distances are great-circle (haversine) kilometres on a spherical Earth.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "EARTH_RADIUS_KM",
    "POI_CATEGORIES",
    "GazetteerEntry",
    "PoiEntry",
    "Gazetteer",
    "PoiIndex",
    "haversine_km",
    "reverse_geocode",
    "classify_poi",
    "load_gazetteer",
    "load_poi_index",
]

EARTH_RADIUS_KM = 6371.0088  # IUGG mean Earth radius

POI_CATEGORIES = (
    "Restaurants",
    "Hotels",
    "Life services",
    "Shops",
    "Enterprises",
    "Transportation",
    "Entertainment",
    "Neighborhoods",
    "Education",
)

DEFAULT_POI_MAX_KM = 0.5


def _check_coords(lat: float, lon: float) -> None:
    if not -90.0 <= lat <= 90.0:
        raise ValueError(f"latitude {lat} outside [-90, 90]")
    if not -180.0 <= lon <= 180.0:
        raise ValueError(f"longitude {lon} outside [-180, 180]")


@dataclass(frozen=True)
class GazetteerEntry:
    name: str
    lat: float
    lon: float
    radius_km: float

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("entry name must be non-empty")
        _check_coords(self.lat, self.lon)
        if not self.radius_km > 0:
            raise ValueError(f"radius_km must be positive, got {self.radius_km}")


@dataclass(frozen=True)
class PoiEntry:
    name: str
    category: str
    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("entry name must be non-empty")
        if self.category not in POI_CATEGORIES:
            raise ValueError(f"unknown POI category {self.category!r}")
        _check_coords(self.lat, self.lon)


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance between two points in kilometres."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2) - math.radians(lon1)
    h = math.sin(dp / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


class _NearestIndex:
    """Shared nearest-entry machinery over precomputed coordinate arrays."""

    def __init__(self, names: Sequence[str], lats: Sequence[float], lons: Sequence[float]):
        if not names:
            raise ValueError("index must contain at least one entry")
        self.names = tuple(names)
        self._lat_rad = np.radians(np.asarray(lats, dtype=float))
        self._lon_rad = np.radians(np.asarray(lons, dtype=float))
        self._cos_lat = np.cos(self._lat_rad)

    def __len__(self) -> int:
        return len(self.names)

    def _distances_km(self, lat: float, lon: float) -> np.ndarray:
        _check_coords(lat, lon)
        p = math.radians(lat)
        l = math.radians(lon)
        h = (
            np.sin((self._lat_rad - p) / 2.0) ** 2
            + math.cos(p) * self._cos_lat * np.sin((self._lon_rad - l) / 2.0) ** 2
        )
        return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.minimum(1.0, np.sqrt(h)))

    def _nearest_within(self, dist: np.ndarray, limit: np.ndarray | float):
        """Index of the qualifying entry with smallest (distance, name), or None."""
        mask = dist <= limit
        if not mask.any():
            return None
        dmin = dist[mask].min()
        candidates = np.flatnonzero(mask & (dist == dmin))
        return min(candidates, key=lambda i: self.names[i])


class Gazetteer(_NearestIndex):
    def __init__(self, entries: Iterable[GazetteerEntry]):
        self.entries = tuple(entries)
        super().__init__(
            [e.name for e in self.entries],
            [e.lat for e in self.entries],
            [e.lon for e in self.entries],
        )
        self._radius = np.asarray([e.radius_km for e in self.entries], dtype=float)

    def lookup(self, lat: float, lon: float) -> str | None:
        i = self._nearest_within(self._distances_km(lat, lon), self._radius)
        return None if i is None else self.names[i]


class PoiIndex(_NearestIndex):
    def __init__(self, entries: Iterable[PoiEntry]):
        self.entries = tuple(entries)
        super().__init__(
            [e.name for e in self.entries],
            [e.lat for e in self.entries],
            [e.lon for e in self.entries],
        )
        self._categories = tuple(e.category for e in self.entries)

    def lookup(self, lat: float, lon: float, max_km: float = DEFAULT_POI_MAX_KM) -> str | None:
        if not max_km > 0:
            raise ValueError(f"max_km must be positive, got {max_km}")
        i = self._nearest_within(self._distances_km(lat, lon), max_km)
        return None if i is None else self._categories[i]


def reverse_geocode(lat: float, lon: float, gazetteer: Gazetteer) -> str | None:
    """City/county name covering the point, or None if nothing qualifies."""
    return gazetteer.lookup(lat, lon)


def classify_poi(
    lat: float, lon: float, poi_index: PoiIndex, max_km: float = DEFAULT_POI_MAX_KM
) -> str | None:
    """Category of the nearest POI within max_km, or None (uncategorized)."""
    return poi_index.lookup(lat, lon, max_km)


def _read_table(path: str | Path, expected_header: list[str]) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows or rows[0] != expected_header:
        raise ValueError(f"{path}: expected header {','.join(expected_header)}")
    out = []
    for r in rows[1:]:
        if len(r) != len(expected_header):
            raise ValueError(f"{path}: row has {len(r)} fields, expected {len(expected_header)}")
        out.append(dict(zip(expected_header, r)))
    return out


def load_gazetteer(path: str | Path) -> Gazetteer:
    """Load a gazetteer CSV with header name,lat,lon,radius_km."""
    entries = [
        GazetteerEntry(
            name=r["name"], lat=float(r["lat"]), lon=float(r["lon"]),
            radius_km=float(r["radius_km"]),
        )
        for r in _read_table(path, ["name", "lat", "lon", "radius_km"])
    ]
    return Gazetteer(entries)


def load_poi_index(path: str | Path) -> PoiIndex:
    """Load a POI CSV with header name,category,lat,lon."""
    entries = [
        PoiEntry(
            name=r["name"], category=r["category"], lat=float(r["lat"]), lon=float(r["lon"]),
        )
        for r in _read_table(path, ["name", "category", "lat", "lon"])
    ]
    return PoiIndex(entries)
