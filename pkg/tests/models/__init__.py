"""Tests for model modules."""
