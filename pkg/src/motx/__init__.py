"""Motivic Morava K-theory computations at odd primes."""

__version__ = "0.1.0"
