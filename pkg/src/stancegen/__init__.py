"""stancegen: stance-based persona corpus engineering toolkit."""

__version__ = "0.1.0"
