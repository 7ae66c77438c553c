"""Integrated analysis tools operating on any record selection."""

from barcodelab.analytics.njtree import NjTree, neighbor_joining, nj_tree
from barcodelab.analytics.summaries import distance_summary, barcode_gap, diagnostic_characters
from barcodelab.analytics.geo import haversine_km, mantel_test, minimum_spanning_tree, geo_distance_correlation
from barcodelab.analytics.diversity import accumulation_curve, diversity

__all__ = [
    "NjTree",
    "neighbor_joining",
    "nj_tree",
    "distance_summary",
    "barcode_gap",
    "diagnostic_characters",
    "haversine_km",
    "mantel_test",
    "minimum_spanning_tree",
    "geo_distance_correlation",
    "accumulation_curve",
    "diversity",
]
