"""Process-wide helpers: structured logging setup."""
