"""Unit tests for the multitime recurrence toolkit."""
