"""Heights, joint regularity and D-ratios of rational self-maps of projective space."""

from __future__ import annotations

from . import algebra, dynamics, harness, heights, maps, picard

__all__ = ["algebra", "dynamics", "harness", "heights", "maps", "picard"]
__version__ = "0.1.0"
