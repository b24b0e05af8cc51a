"""Robust token-stream decoder: any token sequence yields a valid molecule.

The engine is total.  Tokens that cannot act in the current state are
consumed with a silent repair (skipped placement, demoted bond order,
dropped ring directive, no-op pop); strict callers can collect every
repair event for diagnostics.  Ring directives are deferred and placed
after the last token, in recording order, only where valence allows.

Group mechanics: a group token instantiates the whole template and
connects the parent bond to the start attachment (index modulo the
attachment count).  While a group is current, each following token is
read as a relative index selecting the next attachment to branch from;
an occupied attachment falls through to the next available one.  A pop
in index position exits the group, as does an index that finds every
attachment spent.  Exiting returns to the nearest branchpoint recorded
before the group was placed; if that branchpoint is itself an open
group, its index loop resumes.
"""

from __future__ import annotations

from weakref import WeakKeyDictionary

from .groups import EMPTY_GROUPSET, Group, GroupSet
from .molgraph import GraphBuilder, MolGraph
from .tokens import (ATOM, BRANCH, FWD, GROUP, MODIFIER_ORDER, POP, RING,
                     Token)

_PACK_CACHE: "WeakKeyDictionary[Group, tuple]" = WeakKeyDictionary()


def _instantiation_pack(group: Group) -> tuple:
    """Template data flattened for fast instantiation.

    Returns (atoms, frees, local_adjacency, bonds) where frees are the
    bare-template free valences and adjacency maps use local indices.
    """
    pack = _PACK_CACHE.get(group)
    if pack is None:
        template = group.template
        atoms = tuple((a.element, a.charge, a.explicit_h, a.aromatic)
                      for a in template.atoms)
        frees = tuple(template.free_valence(i) for i in range(template.n))
        adjacency = tuple(
            {j: order for j, order in template.neighbors(i)}
            for i in range(template.n))
        bonds = tuple((b.a, b.b, b.order, b.annot) for b in template.bonds)
        pack = (atoms, frees, adjacency, bonds)
        _PACK_CACHE[group] = pack
    return pack

# current-position kinds
_START = 0
_AT_ATOM = 1
_AT_ATTACH = 2
_AT_GIDX = 3


class GroupInstance:
    """One placed group: template offset plus live attachment capacities."""

    __slots__ = ("group", "base", "cur_idx", "remaining", "ret")

    def __init__(self, group: Group, base: int, start: int, ret):
        self.group = group
        self.base = base
        self.cur_idx = start
        self.remaining = [m.valency_cap for m in group.attachments]
        self.ret = ret

    def host_atom(self, attach_idx: int) -> int:
        return self.base + self.group.attachments[attach_idx].host


class DecoderEngine:
    """Incremental decoder; feed tokens one at a time, then finish()."""

    def __init__(self, groupset: GroupSet = EMPTY_GROUPSET,
                 record_events: bool = False):
        self.groupset = groupset
        self.builder = GraphBuilder(groupset.table)
        self.stack: list = []  # positions (tuples) and GroupInstance frames
        self.current = (_START,)
        self.pending_rings: list[tuple[int, int, bool, int, str | None]] = []
        self.events: list[str] | None = [] if record_events else None
        # ring-directive read state
        self._ring_need = 0
        self._ring_digits: list[int] = []
        self._ring_fwd_open = False
        self._ring_fwd = False
        self._ring_source: int | None = None
        self._ring_order = 1
        self._ring_annot: str | None = None

    # -- helpers ---------------------------------------------------------

    def _note(self, message: str) -> None:
        if self.events is not None:
            self.events.append(message)

    def _digit(self, token: Token) -> int:
        return self.groupset.overload_table.digit(token)

    def _available(self, frame: GroupInstance, attach_idx: int) -> bool:
        return (frame.remaining[attach_idx] > 0
                and self.builder.free[frame.host_atom(attach_idx)] > 0)

    def _target_capacity(self) -> int:
        """Free valence available for bonding at the current position."""
        kind = self.current[0]
        if kind == _AT_ATOM:
            return self.builder.free[self.current[1]]
        if kind == _AT_ATTACH:
            frame, attach_idx = self.current[1], self.current[2]
            return min(frame.remaining[attach_idx],
                       self.builder.free[frame.host_atom(attach_idx)])
        return 0

    def _bond_from_current(self, new_atom: int, order: int,
                           annot: str | None) -> None:
        kind = self.current[0]
        if kind == _AT_ATOM:
            self.builder.add_bond(self.current[1], new_atom, order, annot)
        else:
            frame, attach_idx = self.current[1], self.current[2]
            self.builder.add_bond(frame.host_atom(attach_idx), new_atom, order, annot)
            frame.remaining[attach_idx] -= order

    def _exit_group(self, frame: GroupInstance) -> None:
        top = self.stack.pop()
        assert top is frame, "group frame must be on top at exit"
        if not self.stack:
            self.current = frame.ret
            return
        top = self.stack[-1]
        if isinstance(top, GroupInstance):
            self.current = (_AT_GIDX, top)
        else:
            self.stack.pop()
            self.current = top

    def _pop_token(self) -> None:
        if not self.stack:
            self._note("pop on empty stack ignored")
            return
        top = self.stack[-1]
        if isinstance(top, GroupInstance):
            self.current = (_AT_GIDX, top)
        else:
            self.stack.pop()
            self.current = top

    # -- token dispatch --------------------------------------------------

    def feed(self, token: Token) -> None:
        if self._ring_need:
            self._feed_ring_digit(token)
            return
        if self.current[0] == _AT_GIDX:
            self._feed_group_index(token)
            return
        kind = token.kind
        if kind == ATOM:
            self._feed_atom(token)
        elif kind == BRANCH:
            if self.current[0] in (_AT_ATOM, _AT_ATTACH):
                self.stack.append(self.current)
            else:
                self._note("branch with no current atom ignored")
        elif kind == POP:
            self._pop_token()
        elif kind == RING:
            self._start_ring(token)
        elif kind == GROUP:
            self._feed_group(token)
        else:  # forward marker outside a ring directive
            self._note("forward marker outside ring directive ignored")

    def _feed_ring_digit(self, token: Token) -> None:
        if self._ring_fwd_open and token.kind == FWD:
            self._ring_fwd = True
            self._ring_fwd_open = False
            return
        self._ring_fwd_open = False
        self._ring_digits.append(self._digit(token))
        if len(self._ring_digits) < self._ring_need:
            return
        value = 0
        for digit in self._ring_digits:
            value = value * 16 + digit
        self._ring_need = 0
        self._ring_digits = []
        if self._ring_source is None:
            self._note("ring directive with no current atom dropped")
        elif value == 0:
            self._note("ring directive with count 0 dropped")
        else:
            self.pending_rings.append(
                (self._ring_source, value, self._ring_fwd,
                 self._ring_order, self._ring_annot))

    def _start_ring(self, token: Token) -> None:
        kind = self.current[0]
        if kind == _AT_ATOM:
            source = self.current[1]
        elif kind == _AT_ATTACH:
            source = self.current[1].host_atom(self.current[2])
        else:
            source = None
        self._ring_need = token.arity
        self._ring_digits = []
        self._ring_fwd_open = True
        self._ring_fwd = False
        self._ring_source = source
        self._ring_order = MODIFIER_ORDER[token.modifier]
        self._ring_annot = token.modifier if token.modifier in ("/", "\\") else None

    def _feed_group_index(self, token: Token) -> None:
        frame = self.current[1]
        if token.kind == POP:
            self._exit_group(frame)
            return
        count = frame.group.attachment_count
        start = (frame.cur_idx + self._digit(token)) % count
        for step in range(count):
            attach_idx = (start + step) % count
            if self._available(frame, attach_idx):
                if step:
                    self._note("occupied attachment skipped to next available")
                frame.cur_idx = attach_idx
                self.current = (_AT_ATTACH, frame, attach_idx)
                return
        self._note("all attachments spent; group popped")
        self._exit_group(frame)

    def _feed_atom(self, token: Token) -> None:
        table = self.builder.table
        try:
            cap = table.max_valence(token.element, token.charge)
        except KeyError:
            self._note(f"atom token {token.spelling()} outside valence table skipped")
            return
        explicit_h = token.explicit_h
        if explicit_h > cap:
            self._note(f"explicit H count clamped to {cap} on {token.spelling()}")
            explicit_h = cap
        new_free = cap - explicit_h
        annot = token.modifier if token.modifier in ("/", "\\") else None
        if self.current[0] == _START:
            atom_id = self.builder.add_atom(
                token.element, token.charge, explicit_h)
            self.current = (_AT_ATOM, atom_id)
            return
        capacity = self._target_capacity()
        if capacity == 0 or new_free == 0:
            self._note(f"atom token {token.spelling()} skipped: no free valence")
            return
        order = min(MODIFIER_ORDER[token.modifier], capacity, new_free)
        if order != MODIFIER_ORDER[token.modifier]:
            self._note(f"bond order demoted to {order} on {token.spelling()}")
        atom_id = self.builder.add_atom(token.element, token.charge, explicit_h)
        self._bond_from_current(atom_id, order, annot)
        self.current = (_AT_ATOM, atom_id)

    def _feed_group(self, token: Token) -> None:
        group = self.groupset.get(token.name)
        if group is None:
            self._note(f"unknown group token {token.spelling()} skipped")
            return
        count = group.attachment_count
        start = token.start_index % count
        parent = self.current
        parent_capacity = None
        if parent[0] != _START:
            parent_capacity = self._target_capacity()
            if parent_capacity == 0:
                self._note(f"group token {token.spelling()} skipped: no free valence")
                return
        builder = self.builder
        base = len(builder.elements)
        atoms, frees, adjacency, bonds = _instantiation_pack(group)
        for element, charge, explicit_h, aromatic in atoms:
            builder.elements.append(element)
            builder.charges.append(charge)
            builder.explicit_hs.append(explicit_h)
            builder.aromatic.append(aromatic)
        builder.free.extend(frees)
        for local in adjacency:
            builder.adjacency.append(
                {base + j: order for j, order in local.items()})
        for a, b, order, annot in bonds:
            builder._bonds.append([base + a, base + b, order, annot])
        frame = GroupInstance(group, base, start, parent)
        if parent_capacity is not None:
            host = frame.host_atom(start)
            order = min(MODIFIER_ORDER[token.modifier], parent_capacity,
                        group.attachments[start].valency_cap,
                        self.builder.free[host])
            if order != MODIFIER_ORDER[token.modifier]:
                self._note(f"group parent bond demoted to {order}")
            annot = token.modifier if token.modifier in ("/", "\\") else None
            self._bond_from_current(host, order, annot)
            frame.remaining[start] -= order
        self.stack.append(frame)
        self.current = (_AT_GIDX, frame)

    # -- finalization ----------------------------------------------------

    def finish(self) -> MolGraph:
        if self._ring_need:
            self._note("ring directive truncated at end of string dropped")
            self._ring_need = 0
        builder = self.builder
        for source, distance, forward, order, annot in self.pending_rings:
            target = source + distance if forward else source - distance
            if not 0 <= target < builder.n:
                self._note("ring target outside placement order dropped")
                continue
            if builder.has_bond(source, target):
                self._note("duplicate ring bond dropped")
                continue
            effective = min(order, builder.free[source], builder.free[target])
            if effective < 1:
                self._note("ring bond dropped: no free valence")
                continue
            if effective != order:
                self._note(f"ring bond order demoted to {effective}")
            builder.add_bond(source, target, effective, annot)
        self.pending_rings = []
        return builder.finish()


def decode(tokens: list[Token], groupset: GroupSet = EMPTY_GROUPSET) -> MolGraph:
    """Total, deterministic decode of any token list over any dialect."""
    engine = DecoderEngine(groupset)
    for token in tokens:
        engine.feed(token)
    return engine.finish()


def decode_verbose(tokens: list[Token],
                   groupset: GroupSet = EMPTY_GROUPSET
                   ) -> tuple[MolGraph, list[str]]:
    """decode() plus the list of every silently-repaired event."""
    engine = DecoderEngine(groupset, record_events=True)
    for token in tokens:
        engine.feed(token)
    graph = engine.finish()
    return graph, list(engine.events or [])
