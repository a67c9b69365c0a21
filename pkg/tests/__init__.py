"""Tests for the modelkit package."""
