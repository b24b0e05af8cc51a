"""Valence model shared by every module.

The bond-capacity table follows the convention used by robust molecular
string representations: each supported element has a fixed neutral
capacity, and a formal charge of q shifts the capacity by +q (a cation
gains a bonding slot, an anion loses one).  Elements outside the table
are rejected at parse time so that every construction path can rely on
a defined capacity.
"""

from __future__ import annotations

import json
from pathlib import Path

DEFAULT_BASE_VALENCE: dict[str, int] = {
    "H": 1,
    "B": 3,
    "C": 4,
    "N": 3,
    "O": 2,
    "F": 1,
    "P": 5,
    "S": 6,
    "Cl": 1,
    "Br": 1,
    "I": 1,
}

# IUPAC 2021 standard atomic weights, abridged to the table above.
ATOMIC_WEIGHT: dict[str, float] = {
    "H": 1.008,
    "B": 10.81,
    "C": 12.011,
    "N": 14.007,
    "O": 15.999,
    "F": 18.998,
    "P": 30.974,
    "S": 32.06,
    "Cl": 35.45,
    "Br": 79.904,
    "I": 126.904,
}

MAX_CHARGE = 4


class ValenceTable:
    """Maximum bond capacity per (element, formal charge)."""

    def __init__(self, base: dict[str, int] | None = None):
        self._base = dict(DEFAULT_BASE_VALENCE if base is None else base)
        for element, capacity in self._base.items():
            if capacity < 1:
                raise ValueError(f"capacity for {element} must be >= 1, got {capacity}")

    @classmethod
    def from_json(cls, path: str | Path) -> "ValenceTable":
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        if not isinstance(data, dict):
            raise ValueError("valence table file must hold an object of element -> capacity")
        return cls({str(k): int(v) for k, v in data.items()})

    def supports(self, element: str) -> bool:
        return element in self._base

    def elements(self) -> list[str]:
        return sorted(self._base)

    def max_valence(self, element: str, charge: int = 0) -> int:
        """Bond capacity for an element/charge pair; charge shifts by +charge."""
        base = self._base.get(element)
        if base is None:
            raise KeyError(f"element {element!r} is not in the valence table")
        if abs(charge) > MAX_CHARGE:
            raise KeyError(f"charge {charge:+d} on {element} outside supported range")
        return max(base + charge, 0)


DEFAULT_VALENCE = ValenceTable()
