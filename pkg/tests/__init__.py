"""
Tests Package
Test suite for the CM ray class field checks
"""
