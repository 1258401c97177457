"""
Test suite for fracperim.
"""
