"""Banzhaf random forests."""
