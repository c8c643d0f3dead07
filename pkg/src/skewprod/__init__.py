"""Verification engine for submanifolds of flat locally product manifolds."""

__version__ = "0.1.0"
