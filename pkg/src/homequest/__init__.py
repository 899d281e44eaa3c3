"""Household quest benchmark: symbolic world, pragmatic instructions, scored episodes."""

__version__ = "0.1.0"
