"""redline: audit pull requests for semantic redundancy, code metrics, and reviewer emotion."""

__version__ = "0.1.0"
