"""Tests for APSystems API integration."""
