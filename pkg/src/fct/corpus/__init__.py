"""Bundled example instances used by the CLI gallery and the verify sweeps.

Files are stored in the canonical document form, so loading and
re-serialising any of them is a byte-level no-op.
"""

from __future__ import annotations

from importlib import resources

from ..model import Instance, parse_instance

__all__ = ["names", "text", "load"]


def names() -> tuple[str, ...]:
    root = resources.files(__package__)
    found = sorted(
        entry.name[: -len(".json")]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )
    return tuple(found)


def text(name: str) -> str:
    return resources.files(__package__).joinpath(f"{name}.json").read_text("utf-8")


def load(name: str) -> Instance:
    return parse_instance(text(name))
