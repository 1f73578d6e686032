"""Shipped table, overlay, manifest, registry, and scenario files."""

from pathlib import Path

_ROOT = Path(__file__).parent


def data_path(*parts: str) -> Path:
    return _ROOT.joinpath(*parts)
