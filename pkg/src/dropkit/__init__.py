"""Discrete-reasoning toolkit for DROP-style reading comprehension.

Scoring (EM and numeracy-aware F1), predicate-argument tables, a typed
logical-form language with its executor, and the denotation searches used
to build weak supervision.
"""

__version__ = "0.1.0"
