"""Exact and numerical comass of self-dual 4-forms on R^8.

Submodules: ``exterior`` (forms, wedge, Hodge star), ``liealg`` (so(8) and its
action), ``triality`` (diagonal transfer and exact comass), ``optimize``
(Grassmannian ascent and normal forms), ``catalog`` (named calibrations),
``verify`` and ``cli``.
"""

__version__ = "0.1.0"
