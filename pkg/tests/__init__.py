"""
Tests for spdcluster.

Test suite for the spdcluster package components.
"""
