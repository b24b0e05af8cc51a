"""Robust group-token molecular string representation.

Any token string over a dialect's alphabet decodes to a valence-valid
molecule; encoding recognizes user-defined multi-atom groups and is
exactly invertible up to isomorphism.
"""

from .canon import canonical_ranks, isomorphic
from .errors import (EncodeError, GraphError, GroupError, GselfiesError,
                     KekulizationError, ParseError, TokenError)
from .molgraph import Atom, Bond, GraphBuilder, MolGraph, free_valence, validate
from .aromatic import kekulize, perceive_aromatic_atoms
from .smiles import (AttachmentMarker, parse_smiles, parse_template,
                     read_corpus, write_smiles)
from .valence import DEFAULT_VALENCE, ValenceTable

__version__ = "0.1.0"

__all__ = [
    "Atom", "AttachmentMarker", "Bond", "DEFAULT_VALENCE", "EncodeError",
    "GraphBuilder", "GraphError", "GroupError", "GselfiesError",
    "KekulizationError", "MolGraph", "ParseError", "TokenError",
    "ValenceTable", "canonical_ranks", "free_valence", "isomorphic",
    "kekulize", "parse_smiles", "parse_template", "perceive_aromatic_atoms",
    "read_corpus", "validate", "write_smiles", "__version__",
]
