"""Plantation-site suitability engine.

Fuses a 14-rule expert scoring rubric with a gradient-boosted tree-cover-loss
model over a square-grid landscape, classifies every cell into four
suitability classes, and serves the results over HTTP.
"""

__version__ = "0.1.0"
