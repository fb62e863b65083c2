"""Exact p-adic computation of twisted (h,q)-Euler numbers, their measure and l-function."""

__version__ = "0.1.0"
