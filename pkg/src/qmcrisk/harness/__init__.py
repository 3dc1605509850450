"""Experiment configuration, runs, depth scans and output files."""
