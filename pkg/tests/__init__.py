"""Tests for Planify."""
