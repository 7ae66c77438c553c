"""Desk-scale DNA barcode data platform."""

__version__ = "0.1.0"
