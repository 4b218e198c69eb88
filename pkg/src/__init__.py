"""
Package initializer for src.
Keep this file minimal; the command-line entry point lives in src/main.py.
"""
__all__ = []
