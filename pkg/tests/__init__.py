"""Tests for dshock"""
