"""SMILES-subset reader/writer plus the *N attachment-point extension.

Supported input: organic-subset atoms, bracket atoms with explicit
hydrogen counts and charges, bond symbols ``- = # : / \\``, branches,
ring closures (single digit and %nn), dot-separated components, and
lowercase aromatic atoms which are kekulized on load.  Templates may
additionally carry ``*N`` attachment markers bound to the preceding
atom, where N (default 1) is the attachment's valency cap.

Not supported, by design: isotopes, atom maps, reaction arrows, and
wildcard atoms other than ``*N``.  ``@``/``@@`` descriptors are accepted
and dropped with a warning count; ``/`` and ``\\`` are carried on bonds
as annotations without directional semantics.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .aromatic import kekulize
from .errors import GraphError, ParseError
from .molgraph import GraphBuilder, MolGraph
from .valence import DEFAULT_VALENCE, ValenceTable

logger = logging.getLogger(__name__)

ORGANIC_SUBSET = ("Cl", "Br", "B", "C", "N", "O", "P", "S", "F", "I")
AROMATIC_SUBSET = ("b", "c", "n", "o", "p", "s")
_BOND_ORDER = {"-": 1, "=": 2, "#": 3}
_ASCII_DIGITS = "0123456789"


@dataclass(frozen=True)
class AttachmentMarker:
    """An external bonding site on a template atom."""

    host: int           # atom id the marker is bound to
    valency_cap: int    # maximum total bond order through this site
    index: int          # 0-based, in order of appearance


class _Parser:
    def __init__(self, text: str, allow_attachments: bool, table: ValenceTable):
        self.text = text
        self.pos = 0
        self.allow_attachments = allow_attachments
        self.builder = GraphBuilder(table)
        self.prev: int | None = None
        self.branch_stack: list[int] = []
        self.pending: str | None = None
        self.ring_open: dict[int, tuple[int, str | None]] = {}
        self.attachments: list[AttachmentMarker] = []
        self.stereo_centers_dropped = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _take_pending(self, a: int, b: int) -> tuple[int, str | None]:
        """Resolve the bond symbol (if any) written before atom b."""
        symbol = self.pending
        self.pending = None
        both_aromatic = self.builder.aromatic[a] and self.builder.aromatic[b]
        if symbol == ":":
            if not both_aromatic:
                raise self.error("':' bond between non-aromatic atoms")
            return 1, None
        if symbol in ("/", "\\"):
            return 1, symbol
        if symbol is None:
            return 1, None
        return _BOND_ORDER[symbol], None

    def _add_atom(self, element: str, charge: int, explicit_h: int,
                  aromatic: bool) -> None:
        if not self.builder.table.supports(element):
            raise self.error(f"unknown element {element!r}")
        try:
            atom_id = self.builder.add_atom(element, charge, explicit_h, aromatic)
        except (GraphError, KeyError) as exc:
            raise self.error(str(exc)) from exc
        if self.prev is not None:
            self._bond(self.prev, atom_id)
        self.prev = atom_id

    def _bond(self, a: int, b: int, symbol_override: str | None = None) -> None:
        if symbol_override is not None:
            self.pending = symbol_override
        order, annot = self._take_pending(a, b)
        try:
            self.builder.add_bond(a, b, order, annot)
        except GraphError as exc:
            raise self.error(str(exc)) from exc

    def _close_ring(self, number: int) -> None:
        symbol = self.pending
        self.pending = None
        if self.prev is None:
            raise self.error(f"ring closure {number} with no preceding atom")
        entry = self.ring_open.pop(number, None)
        if entry is None:
            self.ring_open[number] = (self.prev, symbol)
            return
        partner, open_symbol = entry
        if symbol is not None and open_symbol is not None and symbol != open_symbol:
            raise self.error(f"conflicting bond symbols on ring closure {number}")
        if partner == self.prev:
            raise self.error(f"ring closure {number} bonds an atom to itself")
        self._bond(partner, self.prev, symbol or open_symbol)

    def _read_bracket(self) -> None:
        self.pos += 1  # consume '['
        text = self.text
        if self.pos < len(text) and text[self.pos] in _ASCII_DIGITS:
            raise self.error("isotope labels are not supported")
        aromatic = False
        if self.pos < len(text) and text[self.pos].isupper():
            element = text[self.pos]
            self.pos += 1
            if self.pos < len(text) and text[self.pos].islower():
                candidate = element + text[self.pos]
                # absorb the lowercase when it completes a known symbol, or
                # when the single letter alone is unknown anyway (better error)
                if self.builder.table.supports(candidate) or \
                        not self.builder.table.supports(element):
                    element = candidate
                    self.pos += 1
        elif self.pos < len(text) and text[self.pos] in AROMATIC_SUBSET:
            element = text[self.pos].upper()
            aromatic = True
            self.pos += 1
        else:
            raise self.error("empty or malformed bracket atom")
        while self.pos < len(text) and text[self.pos] == "@":
            self.stereo_centers_dropped += 1
            self.pos += 1
        explicit_h = 0
        if self.pos < len(text) and text[self.pos] == "H":
            self.pos += 1
            digits = ""
            while self.pos < len(text) and text[self.pos] in _ASCII_DIGITS:
                digits += text[self.pos]
                self.pos += 1
            explicit_h = int(digits) if digits else 1
        charge = 0
        if self.pos < len(text) and text[self.pos] in "+-":
            sign_char = text[self.pos]
            sign = 1 if sign_char == "+" else -1
            self.pos += 1
            repeats = 1
            while self.pos < len(text) and text[self.pos] == sign_char:
                repeats += 1
                self.pos += 1
            digits = ""
            while self.pos < len(text) and text[self.pos] in _ASCII_DIGITS:
                digits += text[self.pos]
                self.pos += 1
            if digits and repeats > 1:
                raise self.error("malformed charge")
            charge = sign * (int(digits) if digits else repeats)
        if self.pos >= len(text) or text[self.pos] != "]":
            raise self.error("unterminated bracket atom")
        self.pos += 1
        self._add_atom(element, charge, explicit_h, aromatic)

    def _read_attachment(self) -> None:
        self.pos += 1  # consume '*'
        if not self.allow_attachments:
            raise self.error("attachment marker outside template mode")
        if self.prev is None:
            raise self.error("attachment marker with no host atom")
        cap = 1
        if self.peek() in _ASCII_DIGITS:
            cap = int(self.peek())
            if cap == 0:
                raise self.error("attachment valency cap must be >= 1")
            self.pos += 1
        self.pending = None  # marker binds through the written bond; the cap rules
        self.attachments.append(
            AttachmentMarker(self.prev, cap, len(self.attachments)))

    def run(self) -> tuple[MolGraph, tuple[AttachmentMarker, ...]]:
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch == "[":
                self._read_bracket()
            elif ch == "*":
                self._read_attachment()
            elif ch == "(":
                if self.prev is None:
                    raise self.error("branch with no preceding atom")
                self.branch_stack.append(self.prev)
                self.pos += 1
            elif ch == ")":
                if not self.branch_stack:
                    raise self.error("unbalanced ')'")
                if self.pending is not None:
                    raise self.error("dangling bond symbol before ')'")
                self.prev = self.branch_stack.pop()
                self.pos += 1
            elif ch in "-=#:/\\":
                if self.pending is not None:
                    raise self.error("two bond symbols in a row")
                self.pending = ch
                self.pos += 1
            elif ch == ".":
                if self.pending is not None or self.branch_stack:
                    raise self.error("'.' inside branch or after bond symbol")
                self.prev = None
                self.pos += 1
            elif ch in _ASCII_DIGITS:
                self.pos += 1
                self._close_ring(int(ch))
            elif ch == "%":
                digits = text[self.pos + 1:self.pos + 3]
                if len(digits) != 2 or any(d not in _ASCII_DIGITS for d in digits):
                    raise self.error("'%' ring closure needs two digits")
                self.pos += 3
                self._close_ring(int(digits))
            else:
                for sym in ORGANIC_SUBSET:
                    if text.startswith(sym, self.pos):
                        self.pos += len(sym)
                        self._add_atom(sym, 0, 0, False)
                        break
                else:
                    if ch in AROMATIC_SUBSET:
                        self.pos += 1
                        self._add_atom(ch.upper(), 0, 0, True)
                    else:
                        raise self.error(f"unexpected character {ch!r}")
        if self.branch_stack:
            raise self.error("unbalanced '(': branch never closed")
        if self.ring_open:
            raise self.error(f"dangling ring closure(s): {sorted(self.ring_open)}")
        if self.pending is not None:
            raise self.error("dangling bond symbol at end of input")
        if self.stereo_centers_dropped:
            logger.warning("dropped %d @/@@ stereo descriptor(s); tetrahedral "
                           "chirality is out of scope", self.stereo_centers_dropped)
        graph = self.builder.finish()
        if any(atom.aromatic for atom in graph.atoms):
            graph = kekulize(graph)
        return graph, tuple(self.attachments)


def parse_smiles(text: str, table: ValenceTable = DEFAULT_VALENCE) -> MolGraph:
    if not text:
        raise ParseError("empty SMILES string")
    graph, _ = _Parser(text, allow_attachments=False, table=table).run()
    return graph


def parse_template(text: str,
                   table: ValenceTable = DEFAULT_VALENCE
                   ) -> tuple[MolGraph, tuple[AttachmentMarker, ...]]:
    """Parse with *N attachment markers enabled."""
    if not text:
        raise ParseError("empty template string")
    return _Parser(text, allow_attachments=True, table=table).run()


def _atom_text(graph: MolGraph, atom_id: int) -> str:
    atom = graph.atoms[atom_id]
    if atom.charge == 0 and atom.explicit_h == 0 and atom.element in ORGANIC_SUBSET:
        return atom.element
    parts = [atom.element]
    if atom.explicit_h == 1:
        parts.append("H")
    elif atom.explicit_h > 1:
        parts.append(f"H{atom.explicit_h}")
    if atom.charge != 0:
        sign = "+" if atom.charge > 0 else "-"
        magnitude = abs(atom.charge)
        parts.append(sign if magnitude == 1 else f"{sign}{magnitude}")
    return "[" + "".join(parts) + "]"


def _bond_text(order: int, annot: str | None) -> str:
    if annot in ("/", "\\"):
        return annot
    return {1: "", 2: "=", 3: "#"}[order]


def write_smiles(graph: MolGraph,
                 attachments: tuple[AttachmentMarker, ...] = ()) -> str:
    """Deterministic Kekule SMILES; re-parses to an isomorphic graph.

    Components are joined with '.'.  With `attachments`, markers are
    emitted as (*N) right after their host atom; marker indices read
    back in first-appearance order of the output.
    """
    if graph.n == 0:
        return ""
    bond_info: dict[frozenset[int], tuple[int, str | None]] = {
        frozenset((b.a, b.b)): (b.order, b.annot) for b in graph.bonds}
    markers_at: dict[int, list[AttachmentMarker]] = {}
    for marker in attachments:
        markers_at.setdefault(marker.host, []).append(marker)
    for lst in markers_at.values():
        lst.sort(key=lambda m: m.index)

    # pass 1: spanning forest (children in ascending-id order) + ring closures
    visited = [False] * graph.n
    children: dict[int, list[int]] = {i: [] for i in range(graph.n)}
    closures_at: dict[int, list[int]] = {i: [] for i in range(graph.n)}
    preorder: dict[int, int] = {}
    roots: list[int] = []
    counter = 0
    for start in range(graph.n):
        if visited[start]:
            continue
        roots.append(start)
        seen_pairs: set[frozenset[int]] = set()
        visited[start] = True
        preorder[start] = counter
        counter += 1
        agenda = [start]
        while agenda:
            node = agenda.pop()
            for nbr in sorted(j for j, _ in graph.neighbors(node)):
                pair = frozenset((node, nbr))
                if pair in seen_pairs:
                    continue
                seen_pairs.add(pair)
                if visited[nbr]:
                    closures_at[node].append(nbr)
                    closures_at[nbr].append(node)
                else:
                    visited[nbr] = True
                    preorder[nbr] = counter
                    counter += 1
                    children[node].append(nbr)
                    agenda.append(nbr)
    # the agenda pops LIFO, so re-sort children by preorder for emission
    for node in children:
        children[node].sort()
        closures_at[node].sort(key=lambda partner: preorder[partner])

    pieces: list[str] = []
    digits_in_use: set[int] = set()
    digit_of: dict[frozenset[int], int] = {}

    def claim_digit() -> int:
        for candidate in range(1, 100):
            if candidate not in digits_in_use:
                digits_in_use.add(candidate)
                return candidate
        raise GraphError("more than 99 concurrently open ring closures")

    def digit_text(number: int) -> str:
        return str(number) if number < 10 else f"%{number:02d}"

    def emit_atom(atom_id: int) -> None:
        pieces.append(_atom_text(graph, atom_id))
        for marker in markers_at.get(atom_id, ()):
            cap_text = "*" if marker.valency_cap == 1 else f"*{marker.valency_cap}"
            pieces.append(f"({cap_text})")
        for partner in closures_at[atom_id]:
            pair = frozenset((atom_id, partner))
            if pair in digit_of:
                number = digit_of.pop(pair)
                digits_in_use.discard(number)
                pieces.append(digit_text(number))
            else:
                number = claim_digit()
                digit_of[pair] = number
                order, annot = bond_info[pair]
                pieces.append(_bond_text(order, annot) + digit_text(number))

    for comp_index, root in enumerate(roots):
        if comp_index:
            pieces.append(".")
        # emission stack: ("atom", id, bond_text, wrapped) or ("lit", text)
        stack: list[tuple] = [("atom", root, "", False)]
        while stack:
            item = stack.pop()
            if item[0] == "lit":
                pieces.append(item[1])
                continue
            _, atom_id, bond_text, wrapped = item
            if wrapped:
                pieces.append("(")
            pieces.append(bond_text)
            emit_atom(atom_id)
            if wrapped:
                stack.append(("lit", ")"))
            kids = children[atom_id]
            for idx in range(len(kids) - 1, -1, -1):
                child = kids[idx]
                order, annot = bond_info[frozenset((atom_id, child))]
                stack.append(("atom", child, _bond_text(order, annot),
                              idx < len(kids) - 1))
    return "".join(pieces)


def write_template(graph: MolGraph,
                   attachments: tuple[AttachmentMarker, ...]) -> str:
    return write_smiles(graph, attachments)


@dataclass
class CorpusLoad:
    molecules: list[MolGraph]
    skipped: int
    errors: list[tuple[int, str]]


def read_corpus(path, table: ValenceTable = DEFAULT_VALENCE,
                limit: int | None = None) -> CorpusLoad:
    """Read a one-record-per-line corpus: `<smiles>[<TAB><id>]`.

    Unparseable lines are skipped, counted, and logged.
    """
    molecules: list[MolGraph] = []
    errors: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            record = line.strip()
            if not record:
                continue
            if limit is not None and len(molecules) >= limit:
                break
            smiles = record.split()[0]
            try:
                molecules.append(parse_smiles(smiles, table))
            except ParseError as exc:
                errors.append((lineno, str(exc)))
                logger.warning("skipping corpus line %d: %s", lineno, exc)
    return CorpusLoad(molecules, len(errors), errors)
