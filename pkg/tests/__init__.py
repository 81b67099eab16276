"""Tests for arithdyn."""
