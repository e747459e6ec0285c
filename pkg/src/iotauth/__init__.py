"""Lightweight physical-layer authentication and trust-based authorization for IoT.

Submodules are imported explicitly (``from iotauth import sim``); this package
init only exposes the version.
"""

__version__ = "0.1.0"
