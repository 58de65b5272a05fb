"""Tests for modemix."""
