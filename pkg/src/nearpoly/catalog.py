"""Bundled catalog of named intersection arrays."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .graph import DistanceGraph, IntersectionArray


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    array: IntersectionArray
    provenance: str
    construct: dict | None = None

    def build_graph(self, guard: int | None = None) -> DistanceGraph:
        """Construct the graph behind this entry, when it has a construction."""
        from . import polar

        if self.construct is None:
            raise ValueError(f"catalog entry {self.name!r} has no construction")
        recipe = dict(self.construct)
        kw = {} if guard is None else {"guard": guard}
        if recipe["kind"] == "hamming":
            return polar.build_hamming_graph(recipe["d"], recipe["n"], **kw)
        space = polar.make_polar_space(recipe["family"], recipe["d"], recipe["p"], recipe.get("m", 1))
        return polar.build_dual_polar_graph(space, **kw)

    def to_json(self) -> dict:
        out = {"name": self.name, "array": str(self.array).strip("{}"),
               "provenance": self.provenance}
        if self.construct:
            out["construct"] = self.construct
        return out


def load_catalog(path=None) -> list[CatalogEntry]:
    """Read a catalog JSON file (default: the bundled one); arrays are validated."""
    if path is None:
        text = resources.files("nearpoly").joinpath("data/catalog.json").read_text()
    else:
        text = Path(path).read_text()
    entries = []
    for raw in json.loads(text):
        try:
            arr = IntersectionArray.parse(raw["array"])
        except ValueError as exc:
            raise ValueError(f"catalog entry {raw.get('name')!r}: {exc}") from None
        entries.append(CatalogEntry(raw["name"], arr, raw.get("provenance", ""),
                                    raw.get("construct")))
    return entries


def get_entry(name: str, path=None) -> CatalogEntry:
    for e in load_catalog(path):
        if e.name.lower() == name.lower():
            return e
    raise KeyError(name)
