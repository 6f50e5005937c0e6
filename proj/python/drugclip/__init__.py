"""Dual-encoder drug-disease ranking: SMILES in, ranked drug lists out."""

from ._core import __version__
from ._core import (
    Atom,
    Bond,
    DiseaseCode,
    Error,
    Model,
    MolGraph,
    Ontology,
    ancestors,
    atom_features,
    bond_feature,
    evaluate,
    hit_at_k,
    normalize_code,
    parse_smiles,
    rank,
    train,
)

__all__ = [
    "Atom",
    "Bond",
    "DiseaseCode",
    "Error",
    "Model",
    "MolGraph",
    "Ontology",
    "ancestors",
    "atom_features",
    "bond_feature",
    "evaluate",
    "hit_at_k",
    "normalize_code",
    "parse_smiles",
    "rank",
    "train",
]
