"""Composition operators on weighted Hilbert spaces of the disk."""
