# Makes "cli" a package and re-exports the entry point.
from .app import build_parser, main

__all__ = ["build_parser", "main"]
