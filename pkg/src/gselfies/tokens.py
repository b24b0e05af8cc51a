"""Lexing/unlexing of token strings and the index-overload table.

Every token is one bracketed unit.  An optional bond modifier
(``=`` ``#`` ``/`` ``\\``) may prefix any payload.  Payload forms:

    pop  ->  Branch  Ring1 Ring2 Ring3
    :<start><name>                       group reference
    <El>[H<n>][(+|-)<n>]                 atom with optional explicit H / charge

Spellings are canonical: anything the strict lexer accepts respells to
the identical string.  Every token doubles as a base-16 digit through
the published overload table below; group tokens carry their group's
overload value and anything unmapped reads as 0.
"""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple

from .errors import TokenError

ATOM = "atom"
BRANCH = "branch"
POP = "pop"
RING = "ring"
FWD = "fwd"
GROUP = "group"

MODIFIER_ORDER = {"": 1, "=": 2, "#": 3, "/": 1, "\\": 1}


class Token(NamedTuple):
    kind: str
    modifier: str = ""
    element: str = ""
    charge: int = 0
    explicit_h: int = 0
    arity: int = 0
    start_index: int = 0
    name: str = ""

    def spelling(self) -> str:
        return "[" + self.modifier + self.payload() + "]"

    def payload(self) -> str:
        if self.kind == ATOM:
            text = self.element
            if self.explicit_h:
                text += f"H{self.explicit_h}"
            if self.charge:
                text += f"{'+' if self.charge > 0 else '-'}{abs(self.charge)}"
            return text
        if self.kind == BRANCH:
            return "Branch"
        if self.kind == POP:
            return "pop"
        if self.kind == RING:
            return f"Ring{self.arity}"
        if self.kind == FWD:
            return "->"
        return f":{self.start_index}{self.name}"

    def base_spelling(self) -> str:
        """Spelling with the bond modifier stripped."""
        return "[" + self.payload() + "]"


_NUM = r"(?:[1-9][0-9]*)"
_PAYLOAD = re.compile(
    r"(?P<mod>[=#/\\]?)"
    r"(?:(?P<pop>pop)"
    r"|(?P<fwd>->)"
    r"|(?P<branch>Branch)"
    r"|Ring(?P<arity>[123])"
    r"|:(?P<start>0|" + _NUM + r")(?P<name>[A-Za-z][A-Za-z0-9]*)"
    r"|(?P<element>[A-Z][a-z]?)(?:H(?P<hcount>" + _NUM + r"))?"
    r"(?:(?P<sign>[+-])(?P<charge>" + _NUM + r"))?"
    r")$")


def _lex_payload(payload: str) -> Token | None:
    match = _PAYLOAD.match(payload)
    if match is None:
        return None
    mod = match.group("mod")
    if match.group("pop"):
        return Token(POP, mod)
    if match.group("fwd"):
        return Token(FWD, mod)
    if match.group("branch"):
        return Token(BRANCH, mod)
    if match.group("arity"):
        return Token(RING, mod, arity=int(match.group("arity")))
    if match.group("name"):
        return Token(GROUP, mod, start_index=int(match.group("start")),
                     name=match.group("name"))
    charge = 0
    if match.group("sign"):
        charge = int(match.group("charge"))
        if match.group("sign") == "-":
            charge = -charge
    hcount = int(match.group("hcount")) if match.group("hcount") else 0
    return Token(ATOM, mod, element=match.group("element"),
                 charge=charge, explicit_h=hcount)


def tokenize(text: str) -> list[Token]:
    """Strict lexer: raises :class:`TokenError` on any malformed unit."""
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        if text[pos] != "[":
            raise TokenError(f"expected '[' at position {pos}")
        end = text.find("]", pos)
        if end < 0:
            raise TokenError(f"unbalanced bracket at position {pos}")
        payload = text[pos + 1:end]
        if not payload:
            raise TokenError(f"empty token at position {pos}")
        token = _lex_payload(payload)
        if token is None:
            raise TokenError(f"unknown token payload {payload!r} at position {pos}")
        tokens.append(token)
        pos = end + 1
    return tokens


def tokenize_robust(text: str) -> tuple[list[Token], int]:
    """Total lexer: skips unlexable stretches, returning (tokens, skip count)."""
    tokens: list[Token] = []
    skipped = 0
    pos = 0
    while pos < len(text):
        start = text.find("[", pos)
        if start < 0:
            skipped += 1
            break
        if start > pos:
            skipped += 1
        end = text.find("]", start)
        if end < 0:
            skipped += 1
            break
        token = _lex_payload(text[start + 1:end])
        if token is None:
            skipped += 1
        else:
            tokens.append(token)
        pos = end + 1
    return tokens, skipped


def detokenize(tokens: Iterable[Token]) -> str:
    return "".join(token.spelling() for token in tokens)


#: Published digit assignment; modifier variants inherit their base
#: spelling's digit, group tokens read as their overload value, and any
#: unmapped spelling (including [pop] and [->]) reads as 0.  [pop] and
#: [->] deliberately have no digit of their own: a pop in relative-index
#: position exits the current group and a forward marker right after a
#: ring token flips its direction, so the encoder could never use them
#: to spell a number.
DIGIT_SPELLINGS: tuple[str, ...] = (
    "[C]", "[Ring1]", "[Ring2]", "[Ring3]", "[Branch]", "[N]", "[O]",
    "[S]", "[P]", "[F]", "[Cl]", "[Br]", "[I]", "[B]", "[N+1]", "[O-1]",
)

_BASE_DIGIT: dict[str, int] = {s: i for i, s in enumerate(DIGIT_SPELLINGS)}

#: Tokens the encoder uses to spell digit d, index d in this tuple.
DIGIT_TOKENS: tuple[Token, ...] = tuple(
    tokenize(spelling)[0] for spelling in DIGIT_SPELLINGS)


class OverloadTable:
    """token -> base-16 digit, total over every spelling."""

    def __init__(self, group_overloads: dict[str, int] | None = None):
        self._groups = dict(group_overloads or {})

    def digit(self, token: Token) -> int:
        if token.kind == GROUP:
            return self._groups.get(token.name, 0)
        return _BASE_DIGIT.get(token.base_spelling(), 0)


def index_value(token: Token, table: OverloadTable) -> int:
    return table.digit(token)
