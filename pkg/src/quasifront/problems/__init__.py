"""Bundled problem files and helpers to load them."""

from importlib import resources
from pathlib import Path

from ..model import QvpProblem, load_problem

_SUFFIX = ".json"


def names() -> list[str]:
    """Names of the bundled problems."""
    root = resources.files(__package__)
    return sorted(
        entry.name[: -len(_SUFFIX)]
        for entry in root.iterdir()
        if entry.name.endswith(_SUFFIX)
    )


def path(name: str) -> Path:
    """Filesystem path of a bundled problem file."""
    target = resources.files(__package__) / f"{name}{_SUFFIX}"
    if not target.is_file():
        raise FileNotFoundError(f"no bundled problem named {name!r}; have {names()}")
    return Path(str(target))


def load(name: str, **kwargs) -> QvpProblem:
    """Load and validate a bundled problem by name."""
    return load_problem(path(name), **kwargs)
