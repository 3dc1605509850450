"""Amplitude-estimation circuits for equity, rate and credit risk scenarios."""

__version__ = "0.1.0"
