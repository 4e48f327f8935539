"""Geospatial lookups against a brute-force haversine scan."""

import math

import numpy as np
import pytest

from extro.geo import (
    EARTH_RADIUS_KM,
    POI_CATEGORIES,
    Gazetteer,
    GazetteerEntry,
    PoiEntry,
    PoiIndex,
    classify_poi,
    haversine_km,
    load_gazetteer,
    load_poi_index,
    reverse_geocode,
)


class TestHaversine:
    def test_zero_distance(self):
        assert haversine_km(31.2, 121.5, 31.2, 121.5) == 0.0

    def test_one_degree_longitude_at_equator(self):
        expected = math.pi / 180.0 * EARTH_RADIUS_KM
        assert haversine_km(0.0, 0.0, 0.0, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_antipodal_is_half_circumference(self):
        expected = math.pi * EARTH_RADIUS_KM
        assert haversine_km(0.0, 0.0, 0.0, 180.0) == pytest.approx(expected, rel=1e-9)

    def test_symmetry(self):
        a, b = (39.9, 116.4), (31.2, 121.5)
        assert haversine_km(*a, *b) == pytest.approx(haversine_km(*b, *a), rel=1e-15)


def brute_force_nearest(lat, lon, entries, limit_of):
    """Reference scan: smallest (distance, name) among qualifying entries."""
    best = None
    for e in entries:
        d = haversine_km(lat, lon, e.lat, e.lon)
        if d <= limit_of(e):
            key = (d, e.name)
            if best is None or key < best[0]:
                best = (key, e)
    return None if best is None else best[1]


def random_gazetteer(rng, n):
    return [
        GazetteerEntry(
            name=f"g{i:04d}",
            lat=float(rng.uniform(-60, 60)),
            lon=float(rng.uniform(-179, 179)),
            radius_km=float(rng.uniform(5, 400)),
        )
        for i in range(n)
    ]


class TestReverseGeocode:
    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(17)
        entries = random_gazetteer(rng, 200)
        gaz = Gazetteer(entries)
        for _ in range(1000):
            lat = float(rng.uniform(-60, 60))
            lon = float(rng.uniform(-179, 179))
            ref = brute_force_nearest(lat, lon, entries, lambda e: e.radius_km)
            got = reverse_geocode(lat, lon, gaz)
            assert got == (None if ref is None else ref.name)

    def test_outside_every_radius_is_none(self):
        gaz = Gazetteer([GazetteerEntry(name="x", lat=0.0, lon=0.0, radius_km=1.0)])
        assert reverse_geocode(10.0, 10.0, gaz) is None

    def test_equidistant_tie_takes_smaller_name(self):
        gaz = Gazetteer(
            [
                GazetteerEntry(name="beta", lat=0.0, lon=1.0, radius_km=500.0),
                GazetteerEntry(name="alpha", lat=0.0, lon=-1.0, radius_km=500.0),
            ]
        )
        assert reverse_geocode(0.0, 0.0, gaz) == "alpha"

    def test_coordinate_validation(self):
        gaz = Gazetteer([GazetteerEntry(name="x", lat=0.0, lon=0.0, radius_km=1.0)])
        with pytest.raises(ValueError):
            reverse_geocode(91.0, 0.0, gaz)
        with pytest.raises(ValueError):
            reverse_geocode(0.0, 181.0, gaz)

    def test_empty_index_rejected(self):
        with pytest.raises(ValueError):
            Gazetteer([])


class TestClassifyPoi:
    def test_matches_brute_force_scan(self):
        rng = np.random.default_rng(23)
        entries = [
            PoiEntry(
                name=f"p{i:04d}",
                category=POI_CATEGORIES[i % len(POI_CATEGORIES)],
                lat=float(rng.uniform(30, 32)),
                lon=float(rng.uniform(120, 122)),
            )
            for i in range(300)
        ]
        index = PoiIndex(entries)
        for _ in range(500):
            lat = float(rng.uniform(30, 32))
            lon = float(rng.uniform(120, 122))
            ref = brute_force_nearest(lat, lon, entries, lambda e: 0.5)
            got = classify_poi(lat, lon, index, max_km=0.5)
            assert got == (None if ref is None else ref.category)

    def test_max_km_gates_the_match(self):
        index = PoiIndex([PoiEntry(name="p", category="Shops", lat=0.0, lon=0.0)])
        assert classify_poi(0.0, 0.003, index, max_km=0.5) == "Shops"
        assert classify_poi(0.0, 0.03, index, max_km=0.5) is None
        assert classify_poi(0.0, 0.03, index, max_km=5.0) == "Shops"

    def test_max_km_must_be_positive(self):
        index = PoiIndex([PoiEntry(name="p", category="Shops", lat=0.0, lon=0.0)])
        with pytest.raises(ValueError):
            classify_poi(0.0, 0.0, index, max_km=0.0)


class TestLoaders:
    def test_gazetteer_csv(self, tmp_path):
        p = tmp_path / "gaz.csv"
        p.write_text("name,lat,lon,radius_km\nTown,30.5,120.25,12.5\n", encoding="utf-8")
        gaz = load_gazetteer(p)
        assert gaz.entries[0].radius_km == 12.5
        assert reverse_geocode(30.5, 120.25, gaz) == "Town"

    def test_poi_csv(self, tmp_path):
        p = tmp_path / "poi.csv"
        p.write_text("name,category,lat,lon\nCafe X,Restaurants,30.0,120.0\n", encoding="utf-8")
        index = load_poi_index(p)
        assert classify_poi(30.0, 120.0, index) == "Restaurants"

    def test_header_mismatch_rejected(self, tmp_path):
        p = tmp_path / "gaz.csv"
        p.write_text("name,lat,lon\nTown,30.5,120.25\n", encoding="utf-8")
        with pytest.raises(ValueError, match="expected header"):
            load_gazetteer(p)

    def test_ragged_row_rejected(self, tmp_path):
        p = tmp_path / "poi.csv"
        p.write_text("name,category,lat,lon\nCafe,Restaurants,30.0\n", encoding="utf-8")
        with pytest.raises(ValueError, match="fields"):
            load_poi_index(p)
