"""Contact-complexity scoring: teacher model, student routing model, and
distribution-comparison effectiveness metrics on synthetic contact data."""

__version__ = "0.1.0"
