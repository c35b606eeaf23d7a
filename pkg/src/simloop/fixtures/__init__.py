"""Shipped replay fixtures reproducing the reference tagging runs."""
from importlib.resources import files
from pathlib import Path


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture file."""
    return Path(str(files("simloop.fixtures").joinpath(name)))
