"""
pointspec - Test Suite.

Property-based and unit tests for the spectral analysis toolkit.
"""
