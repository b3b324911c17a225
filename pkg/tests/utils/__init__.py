"""Tests for utils modules."""
