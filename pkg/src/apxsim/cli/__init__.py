"""Headless pipeline driver and synthetic evaluation corpus."""
