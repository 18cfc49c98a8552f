"""Unit test package for slotlime."""
