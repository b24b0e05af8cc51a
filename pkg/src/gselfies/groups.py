"""Group definitions, group sets, persistence, and the derived alphabet.

A group is a template molecule with ordered attachment points; a group
set is the named, ordered collection that defines one dialect of the
language.  Group sets are immutable after construction and safe to share
across worker threads or processes.

File format (JSON, human-editable)::

    {"groups": [{"name": "...", "template": "...",
                 "priority": null, "overload": 0}, ...]}

Template strings use the SMILES subset plus *N attachment markers; they
are stored verbatim, so save -> load round-trips exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import GroupError, ParseError
from .molgraph import MolGraph
from .smiles import AttachmentMarker, parse_template
from .tokens import MODIFIER_ORDER, OverloadTable, Token, tokenize
from .valence import DEFAULT_VALENCE, ValenceTable

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")

#: Relative indices are single base-16 digits, so more attachment
#: points than 16 could never be addressed exactly.
MAX_ATTACHMENTS = 16

#: Fragment templates larger than this stop being reusable substituents.
MAX_TEMPLATE_ATOMS = 25


@dataclass(frozen=True)
class Group:
    name: str
    template_text: str
    template: MolGraph
    attachments: tuple[AttachmentMarker, ...]
    priority: int | None = None
    overload_value: int = 0

    @property
    def size(self) -> int:
        return self.template.n

    @property
    def attachment_count(self) -> int:
        return len(self.attachments)

    def effective_priority(self) -> int:
        return self.priority if self.priority is not None else 0


def make_group(name: str, template_text: str, priority: int | None = None,
               overload: int = 0,
               table: ValenceTable = DEFAULT_VALENCE) -> Group:
    if not _NAME_RE.match(name):
        raise GroupError(
            f"invalid group name {name!r}: must be alphanumeric and must "
            "not start with a number")
    if not 0 <= overload <= 15:
        raise GroupError(f"group {name!r}: overload {overload} outside 0..15")
    try:
        template, attachments = parse_template(template_text, table)
    except ParseError as exc:
        raise GroupError(f"group {name!r}: bad template: {exc}") from exc
    if not attachments:
        raise GroupError(f"group {name!r}: template has no attachment points")
    if len(attachments) > MAX_ATTACHMENTS:
        raise GroupError(
            f"group {name!r}: {len(attachments)} attachment points exceed "
            f"the addressable maximum of {MAX_ATTACHMENTS}")
    if len(template.components()) != 1:
        raise GroupError(f"group {name!r}: template must be connected")
    for marker in attachments:
        free = template.free_valence(marker.host)
        if marker.valency_cap > free:
            raise GroupError(
                f"group {name!r}: attachment {marker.index} cap "
                f"{marker.valency_cap} exceeds host free valence {free}")
    return Group(name, template_text, template, attachments, priority, overload)


#: (element, charge) pairs whose tokens belong to the base alphabet.
ALPHABET_ATOMS: tuple[tuple[str, int], ...] = (
    ("B", 0), ("C", 0), ("N", 0), ("O", 0), ("S", 0), ("P", 0),
    ("F", 0), ("Cl", 0), ("Br", 0), ("I", 0),
    ("C", 1), ("C", -1), ("N", 1), ("N", -1), ("O", 1), ("O", -1),
    ("S", 1), ("S", -1), ("P", 1), ("P", -1),
)

_GROUP_MODIFIERS = ("", "=", "#", "/", "\\")


def _structural_spellings() -> list[str]:
    out = []
    for mod in ("", "=", "#", "/", "\\"):
        out.append(f"[{mod}Branch]")
    out.append("[pop]")
    out.append("[->]")
    for arity in (1, 2, 3):
        for mod in ("", "=", "#"):
            out.append(f"[{mod}Ring{arity}]")
    return out


def _atom_spellings(table: ValenceTable) -> list[str]:
    out = []
    for element, charge in ALPHABET_ATOMS:
        payload = element
        if charge:
            payload += f"{'+' if charge > 0 else '-'}{abs(charge)}"
        cap = table.max_valence(element, charge)
        if cap < 1:
            continue
        for mod in ("", "=", "#", "/", "\\"):
            if MODIFIER_ORDER[mod] > cap:
                continue
            out.append(f"[{mod}{payload}]")
    return out


class GroupSet:
    """Named, ordered collection of groups; owns the derived alphabet."""

    def __init__(self, groups: list[Group] | None = None,
                 table: ValenceTable = DEFAULT_VALENCE):
        self.table = table
        self._groups: dict[str, Group] = {}
        for group in groups or []:
            if group.name in self._groups:
                raise GroupError(f"duplicate group name {group.name!r}")
            self._groups[group.name] = group
        self.matching_order: list[str] = sorted(
            self._groups,
            key=lambda n: (-self._groups[n].effective_priority(),
                           -self._groups[n].size, n))
        self.overload_table = OverloadTable(
            {g.name: g.overload_value for g in self._groups.values()})

    def __len__(self) -> int:
        return len(self._groups)

    def __contains__(self, name: str) -> bool:
        return name in self._groups

    def get(self, name: str) -> Group | None:
        return self._groups.get(name)

    def __getitem__(self, name: str) -> Group:
        return self._groups[name]

    def names(self) -> list[str]:
        return list(self._groups)

    def groups_in_matching_order(self) -> list[Group]:
        return [self._groups[name] for name in self.matching_order]

    def alphabet(self) -> list[str]:
        """Token spellings of this dialect, in deterministic order."""
        out = _structural_spellings() + _atom_spellings(self.table)
        seen = set(out)
        for name in self._groups:  # insertion (file) order
            group = self._groups[name]
            for start in range(group.attachment_count):
                for mod in _GROUP_MODIFIERS:
                    spelling = f"[{mod}:{start}{name}]"
                    if spelling not in seen:
                        seen.add(spelling)
                        out.append(spelling)
        return out

    def alphabet_tokens(self) -> list[Token]:
        return [tokenize(spelling)[0] for spelling in self.alphabet()]

    def structurally_equal(self, other: "GroupSet") -> bool:
        if self.names() != other.names():
            return False
        for name in self.names():
            a, b = self[name], other[name]
            if (a.template_text, a.priority, a.overload_value) != \
                    (b.template_text, b.priority, b.overload_value):
                return False
        return True


EMPTY_GROUPSET = GroupSet()

_ALLOWED_KEYS = {"name", "template", "priority", "overload"}


def load_groupset(path: str | Path,
                  table: ValenceTable = DEFAULT_VALENCE) -> GroupSet:
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise GroupError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or set(data) != {"groups"} \
            or not isinstance(data["groups"], list):
        raise GroupError(f"{path}: expected an object with a single 'groups' list")
    groups = []
    for idx, entry in enumerate(data["groups"]):
        if not isinstance(entry, dict):
            raise GroupError(f"{path}: groups[{idx}] is not an object")
        unknown = set(entry) - _ALLOWED_KEYS
        if unknown:
            raise GroupError(f"{path}: groups[{idx}] has unknown keys {sorted(unknown)}")
        if "name" not in entry or "template" not in entry:
            raise GroupError(f"{path}: groups[{idx}] needs 'name' and 'template'")
        priority = entry.get("priority")
        if priority is not None and not isinstance(priority, int):
            raise GroupError(f"{path}: groups[{idx}] priority must be an integer")
        overload = entry.get("overload", 0)
        if not isinstance(overload, int):
            raise GroupError(f"{path}: groups[{idx}] overload must be an integer")
        groups.append(make_group(str(entry["name"]), str(entry["template"]),
                                 priority, overload, table))
    return GroupSet(groups, table)


def save_groupset(groupset: GroupSet, path: str | Path) -> None:
    payload = {
        "groups": [
            {
                "name": group.name,
                "template": group.template_text,
                "priority": group.priority,
                "overload": group.overload_value,
            }
            for group in (groupset[t] for t in groupset.names())
        ]
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
