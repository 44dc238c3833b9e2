"""Screening toolkit for explicitly discriminatory language in job vacancies.

Combines a regex term-catalog baseline with context-aware classifiers and
the annotation and evaluation machinery needed to build and measure such a
detector.
"""

__version__ = "0.1.0"
