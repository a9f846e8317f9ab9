"""Bundled demo coordinates: four landmarks around Kyoto University.

The lab point is the default victim location in the bundled scenarios; the
three surrounding landmarks form the default survey triangle for attackers.
"""

from .geodesy import GeoPoint

SCIENCE_FRONTIER_LAB = GeoPoint(35.02350485, 135.77687703)
DEMACHIYANAGI_STATION = GeoPoint(35.03051251, 135.77327415)
HEIAN_SHRINE = GeoPoint(35.01598257, 135.78242585)
KYOTO_IMPERIAL_PALACE = GeoPoint(35.02258561, 135.76493382)

SURVEY_TRIANGLE = (DEMACHIYANAGI_STATION, HEIAN_SHRINE, KYOTO_IMPERIAL_PALACE)
