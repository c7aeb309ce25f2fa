"""Tests for regtrig."""
