"""Test package for atomlaser."""
