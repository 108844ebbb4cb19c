"""Named fan presets shipped as JSON data files."""

from __future__ import annotations

import json
from importlib import resources

from .lattice import FanPolytope, StructureError

PRESET_NAMES = ("CP1", "CP2", "CP3", "CP1xCP1", "CP1xCP2", "Bl1CP2")


def load_preset(name: str) -> FanPolytope:
    if name not in PRESET_NAMES:
        raise StructureError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    text = resources.files(__package__).joinpath("presets").joinpath(f"{name}.json").read_text()
    return FanPolytope.from_json(json.loads(text), name=name)


def all_presets() -> dict[str, FanPolytope]:
    return {name: load_preset(name) for name in PRESET_NAMES}
