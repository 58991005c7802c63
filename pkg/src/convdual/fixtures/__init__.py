"""Problem fixtures shipped with the package.

``pinch``: the support-formula counterexample map (and its mirror image);
``spike``: the box integrand with a density plus one atom; ``invdist``: the
endpoint-weighted integrand whose closure condition fails; ``nonisc``: a
domain map failing inner semicontinuity; ``reg01``..``reg10``: the regular
duality suite (inner semicontinuous domains, closure condition holds, gaps
vanish under refinement).
"""

from __future__ import annotations

from importlib import resources

from ..problemfile import Problem, load, parse

REGULAR_SUITE = tuple(f"reg{k:02d}" for k in range(1, 11))
ALL = ("pinch", "spike", "invdist", "nonisc") + REGULAR_SUITE


def fixture_path(name: str) -> str:
    """Filesystem path of a shipped fixture (for CLI-level tests)."""
    return str(resources.files(__package__) / f"{name}.json")


def load_fixture(name: str) -> Problem:
    if name not in ALL:
        raise KeyError(f"unknown fixture {name!r}")
    text = (resources.files(__package__) / f"{name}.json").read_text()
    import json

    return parse(json.loads(text), name=name)
