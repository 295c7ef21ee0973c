"""Shared fixtures: the hotel table used across the suite.

Nine hotels, ten columns, six distinct locations, exactly one hotel outside
Greece. Several tests depend on those counts.
"""

from __future__ import annotations

import pytest

from facetprep import build_dataset, parse_table

HOTEL_CSV = b"""\
Name,Location,Longitude,Latitude,Stars,Rooms,Price,Rating,Pets allowed,Smoking allowed
Kydon The Heart City Hotel,Chania,24.018204,35.511233,4,118,95,8.9,not allowed,not allowed
Lato Boutique Hotel,Iraklio,25.138017,35.343436,3,58,75,8.6,not allowed,allowed
Aquila Atlantis Hotel,Iraklio,25.132553,35.341560,5,164,130,8.4,allowed,not allowed
Samaria Hotel,Chania,24.015749,35.514855,4,68,110,9.0,not allowed,not allowed
Electra Palace,Athens,23.731998,37.972634,5,155,180,8.8,not allowed,allowed
Grand Hotel Palace,Thessaloniki,22.928445,40.644096,5,261,105,8.5,allowed,allowed
Ibis Paris Montmartre,Paris,2.337644,48.883760,3,326,88,7.9,not allowed,not allowed
Porto Veneziano,Chania,24.023083,35.517672,4,57,120,8.7,not allowed,not allowed
Capsis Astoria,Heraklion,25.137066,35.339193,4,131,98,8.2,allowed,not allowed
"""

NEW_HOTEL_CELLS = (
    "Mitsis Laguna Resort & Spa",
    "Heraklion",
    "25.371359",
    "35.307237",
    "5",
    "385",
    "115",
    "8.7",
    "allowed",
    "not allowed",
)


@pytest.fixture
def hotel_raw():
    return parse_table(HOTEL_CSV)


@pytest.fixture
def hotel_dataset(hotel_raw):
    return build_dataset(hotel_raw)
