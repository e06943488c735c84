"""Search-based crash reproduction seeded with behavioral models and existing tests."""

__version__ = "0.1.0"
