"""Integration tests with real containers (testcontainers)."""
