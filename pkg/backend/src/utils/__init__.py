"""Utility helpers for backend scripts."""
