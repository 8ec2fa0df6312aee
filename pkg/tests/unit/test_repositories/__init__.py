"""Unit tests for repositories."""
