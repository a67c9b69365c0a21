"""Exact symmetry analysis of rigid polynomial model domains."""
