"""Standalone figure renderer for exported degeneracy-geometry datasets.

Consumes only the JSON files written by the analysis CLI; never imports
the analysis package.
"""

from .render import (SchemaError, hypersimplex_corners, hypersimplex_edges,
                     render, wireframe_corners)

__version__ = "0.1.0"
