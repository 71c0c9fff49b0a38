"""Toolkit for evaluating articulatory feature trajectories with minimal pairs.

Pipeline pieces: trajectory/manifest I/O (AFT1 binary + JSON-lines),
per-speaker z-normalization and zero-phase Butterworth smoothing, DTW target
extraction, minimal-pair mining from pronunciation dictionaries,
leave-one-out SVM classification, voicing scoring, and a consistency
training loss with analytic gradients.
"""

__version__ = "0.1.0"

from artikit.errors import DataError, ParseError, ToolkitError

__all__ = ["DataError", "ParseError", "ToolkitError", "__version__"]
