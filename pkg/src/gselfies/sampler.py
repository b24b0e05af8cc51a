"""Bag-of-tokens random generation and distribution metrics.

Generation: encode the corpus, pool every token into one multiset, then
repeatedly draw a source string's length and that many tokens uniformly
with replacement.  Decoder totality turns every draw into a valid
molecule.  All randomness flows through one ``random.Random(seed)``
(Mersenne Twister), so runs are reproducible across platforms; draws
consume the stream in a fixed order (length index, then one index per
token).
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass

from .aromatic import perceive_aromatic_atoms
from .decoder import decode
from .encoder import encode
from .errors import EncodeError
from .groups import GroupSet
from .molgraph import MolGraph
from .tokens import Token
from .valence import ATOMIC_WEIGHT

logger = logging.getLogger(__name__)


@dataclass
class TokenBag:
    tokens: list[Token]   # flattened multiset, one entry per occurrence
    lengths: list[int]    # token count of each source string
    skipped: int = 0      # corpus molecules that failed to encode

    @property
    def size(self) -> int:
        return len(self.tokens)


def build_bag(corpus: list[MolGraph], groupset: GroupSet) -> TokenBag:
    """Encode every corpus molecule and pool the tokens."""
    if not corpus:
        raise ValueError("corpus is empty")
    tokens: list[Token] = []
    lengths: list[int] = []
    skipped = 0
    for index, mol in enumerate(corpus):
        try:
            encoded = encode(mol, groupset)
        except EncodeError as exc:
            skipped += 1
            logger.warning("skipping corpus molecule %d: %s", index, exc)
            continue
        if not encoded:
            skipped += 1
            continue
        tokens.extend(encoded)
        lengths.append(len(encoded))
    if not tokens:
        raise ValueError("no corpus molecule could be encoded")
    return TokenBag(tokens, lengths, skipped)


def sample_with_tokens(bag: TokenBag, groupset: GroupSet, n: int,
                       seed: int) -> list[tuple[list[Token], MolGraph]]:
    """n (token string, decoded molecule) pairs, reproducible from seed."""
    rng = random.Random(seed)
    tokens, lengths = bag.tokens, bag.lengths
    pool = len(tokens)
    out: list[tuple[list[Token], MolGraph]] = []
    for _ in range(n):
        length = lengths[rng.randrange(len(lengths))]
        draw = [tokens[rng.randrange(pool)] for _ in range(length)]
        out.append((draw, decode(draw, groupset)))
    return out


def sample(bag: TokenBag, groupset: GroupSet, n: int, seed: int) -> list[MolGraph]:
    return [mol for _, mol in sample_with_tokens(bag, groupset, n, seed)]


METRIC_FIELDS = ("token_length", "heavy_atom_count", "molecular_weight",
                 "ring_count", "aromatic_atom_count")


def molecule_metrics(mol: MolGraph) -> dict[str, float]:
    """Structural metrics; molecular weight fills open valence with H."""
    weight = 0.0
    h_weight = ATOMIC_WEIGHT["H"]
    for atom_id, atom in enumerate(mol.atoms):
        weight += ATOMIC_WEIGHT[atom.element]
        weight += (atom.explicit_h + mol.free_valence(atom_id)) * h_weight
    return {
        "heavy_atom_count": mol.n,
        "molecular_weight": round(weight, 3),
        "ring_count": mol.ring_count(),
        "aromatic_atom_count": len(perceive_aromatic_atoms(mol)),
    }


def wasserstein_1d(sample_a: list[float], sample_b: list[float]) -> float:
    """Earth-mover distance between two empirical 1-D samples.

    Computed as the integral of |CDF_a - CDF_b|, which equals the mean
    absolute difference of quantile-matched sorted samples when sizes
    agree and interpolates linearly otherwise.
    """
    if not sample_a or not sample_b:
        raise ValueError("samples must be nonempty")
    xs_a = sorted(sample_a)
    xs_b = sorted(sample_b)
    step_a, step_b = 1.0 / len(xs_a), 1.0 / len(xs_b)
    i = j = 0
    cdf_a = cdf_b = 0.0
    prev = min(xs_a[0], xs_b[0])
    total = 0.0
    while i < len(xs_a) or j < len(xs_b):
        if j >= len(xs_b) or (i < len(xs_a) and xs_a[i] <= xs_b[j]):
            value = xs_a[i]
        else:
            value = xs_b[j]
        total += abs(cdf_a - cdf_b) * (value - prev)
        prev = value
        while i < len(xs_a) and xs_a[i] == value:
            cdf_a += step_a
            i += 1
        while j < len(xs_b) and xs_b[j] == value:
            cdf_b += step_b
            j += 1
    return total
