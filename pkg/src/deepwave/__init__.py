"""Spectral tools for quaternion wave packets on deep water."""

__version__ = "0.1.0"
