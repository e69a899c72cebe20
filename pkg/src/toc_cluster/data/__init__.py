"""Shipped defaults and the synthetic fixture corpus."""

from importlib import resources
from pathlib import Path


def data_path(name: str) -> Path:
    return Path(str(resources.files(__name__) / name))


def corpus_path(name: str) -> Path:
    """``reference.toc``, ``target_a.toc``, ``target_b.toc`` or ``truth.csv``."""
    return data_path("corpus") / name
