"""Shipped example model documents."""
