#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "drugclip/error.hpp"
#include "drugclip/tensor.hpp"

namespace drugclip {

// Supported element identities. Anything else parses as Other.
enum class Element { B, C, N, O, P, S, F, Cl, Br, I, H, Other };

constexpr std::size_t kElementCount = 12;

const char* element_symbol(Element e);

struct Atom {
  Element element = Element::Other;
  bool aromatic = false;
  int formal_charge = 0;  // clamped to [-2, +2]
  int degree = 0;         // number of incident bonds
};

// Bond codes: 1 single, 2 double, 3 triple, 4 aromatic. 0 means
// non-connectivity and never appears in a bond list.
constexpr int kBondSingle = 1;
constexpr int kBondDouble = 2;
constexpr int kBondTriple = 3;
constexpr int kBondAromatic = 4;

struct Bond {
  int a = 0;
  int b = 0;
  int code = kBondSingle;
};

struct MolGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::string source;
};

// Parses a single-fragment SMILES string. Atoms appear in reading order;
// implicit hydrogens are not materialized as nodes; stereo markers are
// consumed and ignored.
MolGraph parse_smiles(const std::string& text);

// Fixed 24-slot featurization: element one-hot (12) ++ aromatic flag (1) ++
// formal-charge one-hot over [-2..2] (5) ++ degree one-hot capped at 5 (6).
constexpr std::size_t kAtomFeatureLength = 24;
Tensor atom_features(const Atom& atom);

// One-hot over the four bond codes.
constexpr std::size_t kBondFeatureLength = 4;
Tensor bond_feature(int code);

// Identifies the featurization layout; stored in checkpoints so a model is
// never resumed against differently-shaped features.
std::uint64_t feature_schema_hash();

}  // namespace drugclip
