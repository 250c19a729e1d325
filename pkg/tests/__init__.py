"""
Accretive Evolution Toolkit Test Suite

One module per library module plus the experiment runner. The slow EBM
and uniqueness runs are marked ``slow`` and can be skipped with
``pytest -m "not slow"``.
"""

__version__ = "1.0.0"
