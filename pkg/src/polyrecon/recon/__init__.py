"""Reconstruction engines, one per markup system."""
