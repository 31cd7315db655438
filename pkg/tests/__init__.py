"""Tests for mshw-forecast."""
