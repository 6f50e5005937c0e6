#include "drugclip/molgraph.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "drugclip/rng.hpp"

namespace drugclip {

const char* element_symbol(Element e) {
  switch (e) {
    case Element::B: return "B";
    case Element::C: return "C";
    case Element::N: return "N";
    case Element::O: return "O";
    case Element::P: return "P";
    case Element::S: return "S";
    case Element::F: return "F";
    case Element::Cl: return "Cl";
    case Element::Br: return "Br";
    case Element::I: return "I";
    case Element::H: return "H";
    case Element::Other: return "*";
  }
  return "*";
}

namespace {

Element element_from_symbol(const std::string& symbol) {
  if (symbol == "B") return Element::B;
  if (symbol == "C") return Element::C;
  if (symbol == "N") return Element::N;
  if (symbol == "O") return Element::O;
  if (symbol == "P") return Element::P;
  if (symbol == "S") return Element::S;
  if (symbol == "F") return Element::F;
  if (symbol == "Cl") return Element::Cl;
  if (symbol == "Br") return Element::Br;
  if (symbol == "I") return Element::I;
  if (symbol == "H") return Element::H;
  return Element::Other;
}

struct PendingRing {
  int atom = -1;
  int explicit_code = 0;  // 0 = none given at the opening digit
};

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  MolGraph run() {
    if (text_.empty()) throw err(ErrorKind::EmptyInput, "empty SMILES");
    while (pos_ < text_.size()) {
      step();
    }
    if (!branch_stack_.empty()) throw err(ErrorKind::UnbalancedParen, "unclosed '('");
    if (!open_rings_.empty()) {
      throw err(ErrorKind::UnclosedRing,
                "ring " + std::to_string(open_rings_.begin()->first) + " never closed");
    }
    if (pending_code_ != 0) throw err(ErrorKind::UnknownToken, "dangling bond symbol");
    if (graph_.atoms.empty()) throw err(ErrorKind::EmptyInput, "no atoms");
    for (const Bond& bond : graph_.bonds) {
      graph_.atoms[bond.a].degree += 1;
      graph_.atoms[bond.b].degree += 1;
    }
    graph_.source = text_;
    return std::move(graph_);
  }

 private:
  void step() {
    char c = text_[pos_];
    switch (c) {
      case '.':
        throw err(ErrorKind::MultiFragment, "multi-fragment SMILES rejected");
      case '-': set_pending(kBondSingle); ++pos_; return;
      case '=': set_pending(kBondDouble); ++pos_; return;
      case '#': set_pending(kBondTriple); ++pos_; return;
      case ':': set_pending(kBondAromatic); ++pos_; return;
      case '/':
      case '\\':
        // stereo bond markers carry no information we keep; the bond itself
        // falls out of the implicit-bond rule
        ++pos_;
        return;
      case '(':
        if (pending_code_ != 0) throw err(ErrorKind::UnknownToken, "bond symbol before '('");
        if (prev_atom_ < 0) throw err(ErrorKind::UnknownToken, "branch before any atom");
        branch_stack_.push_back(prev_atom_);
        ++pos_;
        return;
      case ')':
        if (pending_code_ != 0) throw err(ErrorKind::UnknownToken, "bond symbol before ')'");
        if (branch_stack_.empty()) throw err(ErrorKind::UnbalancedParen, "')' without '('");
        prev_atom_ = branch_stack_.back();
        branch_stack_.pop_back();
        ++pos_;
        return;
      case '%': {
        if (pos_ + 2 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
            !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
          throw err(ErrorKind::UnknownToken, "'%' needs two digits");
        }
        int ring = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
        pos_ += 3;
        ring_closure(ring);
        return;
      }
      case '[':
        bracket_atom();
        return;
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++pos_;
      ring_closure(c - '0');
      return;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw err(ErrorKind::UnknownToken, "whitespace inside SMILES");
    }
    organic_atom();
  }

  void organic_atom() {
    char c = text_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      static const std::string aromatic_set = "bcnops";
      if (aromatic_set.find(c) == std::string::npos) {
        throw err(ErrorKind::UnknownToken, std::string("unexpected '") + c + "'");
      }
      ++pos_;
      add_atom(element_from_symbol(std::string(1, std::toupper(static_cast<unsigned char>(c)))),
               /*aromatic=*/true, /*charge=*/0);
      return;
    }
    // two-character symbols first
    if (pos_ + 1 < text_.size()) {
      std::string two = text_.substr(pos_, 2);
      if (two == "Cl" || two == "Br") {
        pos_ += 2;
        add_atom(element_from_symbol(two), false, 0);
        return;
      }
    }
    static const std::string organic_set = "BCNOPSFI";
    if (organic_set.find(c) == std::string::npos) {
      throw err(ErrorKind::UnknownToken, std::string("unexpected '") + c + "'");
    }
    ++pos_;
    add_atom(element_from_symbol(std::string(1, c)), false, 0);
  }

  void bracket_atom() {
    ++pos_;  // consume '['
    // isotope prefix, ignored
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ >= text_.size()) throw err(ErrorKind::UnknownToken, "unterminated bracket atom");

    bool aromatic = false;
    std::string symbol;
    char c = text_[pos_];
    if (c == '*') {
      symbol = "*";
      ++pos_;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      symbol += c;
      ++pos_;
      // greedy two-letter element symbol ([Cl], [Na], ...); 'H' stays
      // separate because it introduces the hydrogen count
      if (pos_ < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_]))) {
        symbol += text_[pos_];
        ++pos_;
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      aromatic = true;
      symbol += std::toupper(static_cast<unsigned char>(c));
      ++pos_;
      // aromatic two-letter symbols like [se], [as]
      if (pos_ < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_])) &&
          text_[pos_] != 'h') {
        std::string pair{c, text_[pos_]};
        if (pair == "se" || pair == "as" || pair == "te" || pair == "si") {
          symbol = "*";  // aromatic heteroatoms outside the supported set
          ++pos_;
        }
      }
    } else {
      throw err(ErrorKind::UnknownToken, "bad element in bracket atom");
    }

    // chirality markers, ignored
    while (pos_ < text_.size() && text_[pos_] == '@') ++pos_;
    if (pos_ + 1 < text_.size()) {
      std::string tag = text_.substr(pos_, 2);
      if (tag == "TH" || tag == "AL" || tag == "SP" || tag == "TB" || tag == "OH") {
        pos_ += 2;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }

    // explicit hydrogen count, consumed but not materialized
    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    int charge = 0;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      int sign = text_[pos_] == '+' ? 1 : -1;
      char sign_char = text_[pos_];
      ++pos_;
      int magnitude = 1;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        magnitude = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          magnitude = magnitude * 10 + (text_[pos_] - '0');
          ++pos_;
        }
      } else {
        while (pos_ < text_.size() && text_[pos_] == sign_char) {
          ++magnitude;
          ++pos_;
        }
      }
      charge = sign * magnitude;
    }

    // atom class, ignored
    if (pos_ < text_.size() && text_[pos_] == ':') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    if (pos_ >= text_.size() || text_[pos_] != ']') {
      throw err(ErrorKind::UnknownToken, "unterminated bracket atom");
    }
    ++pos_;

    charge = std::clamp(charge, -2, 2);
    Element element = symbol == "*" ? Element::Other : element_from_symbol(symbol);
    add_atom(element, aromatic, charge);
  }

  void add_atom(Element element, bool aromatic, int charge) {
    Atom atom;
    atom.element = element;
    atom.aromatic = aromatic;
    atom.formal_charge = charge;
    graph_.atoms.push_back(atom);
    int idx = static_cast<int>(graph_.atoms.size()) - 1;
    if (prev_atom_ >= 0) {
      add_bond(prev_atom_, idx, resolve_code(prev_atom_, idx));
    } else if (pending_code_ != 0) {
      throw err(ErrorKind::UnknownToken, "bond symbol before the first atom");
    }
    pending_code_ = 0;
    prev_atom_ = idx;
  }

  void ring_closure(int ring) {
    if (prev_atom_ < 0) throw err(ErrorKind::UnknownToken, "ring digit before any atom");
    auto it = open_rings_.find(ring);
    if (it == open_rings_.end()) {
      open_rings_[ring] = PendingRing{prev_atom_, pending_code_};
      pending_code_ = 0;
      return;
    }
    PendingRing open = it->second;
    open_rings_.erase(it);
    if (open.atom == prev_atom_) {
      throw err(ErrorKind::SelfRingBond,
                "ring " + std::to_string(ring) + " closes onto its own atom");
    }
    int code = 0;
    if (open.explicit_code != 0 && pending_code_ != 0 && open.explicit_code != pending_code_) {
      throw err(ErrorKind::UnknownToken,
                "conflicting bond symbols on ring " + std::to_string(ring));
    }
    if (open.explicit_code != 0) code = open.explicit_code;
    if (pending_code_ != 0) code = pending_code_;
    if (code == 0) {
      bool both_aromatic = graph_.atoms[open.atom].aromatic && graph_.atoms[prev_atom_].aromatic;
      code = both_aromatic ? kBondAromatic : kBondSingle;
    }
    pending_code_ = 0;
    add_bond(open.atom, prev_atom_, code);
  }

  int resolve_code(int a, int b) {
    if (pending_code_ != 0) return pending_code_;
    bool both_aromatic = graph_.atoms[a].aromatic && graph_.atoms[b].aromatic;
    return both_aromatic ? kBondAromatic : kBondSingle;
  }

  void add_bond(int a, int b, int code) {
    auto key = std::minmax(a, b);
    if (!bond_pairs_.insert(key).second) {
      throw err(ErrorKind::DuplicateBond,
                "duplicate bond between atoms " + std::to_string(a) + " and " + std::to_string(b));
    }
    graph_.bonds.push_back(Bond{a, b, code});
  }

  void set_pending(int code) {
    if (pending_code_ != 0) throw err(ErrorKind::UnknownToken, "two bond symbols in a row");
    pending_code_ = code;
  }

  Error err(ErrorKind kind, const std::string& message) const {
    return Error(kind, message + " (position " + std::to_string(pos_) + " in '" + text_ + "')");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  MolGraph graph_;
  int prev_atom_ = -1;
  int pending_code_ = 0;  // 0 = implicit
  std::vector<int> branch_stack_;
  std::map<int, PendingRing> open_rings_;
  std::set<std::pair<int, int>> bond_pairs_;
};

std::string strip(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

MolGraph parse_smiles(const std::string& text) {
  std::string body = strip(text);
  if (body.empty()) throw Error(ErrorKind::EmptyInput, "empty SMILES");
  return Parser(body).run();
}

Tensor atom_features(const Atom& atom) {
  Tensor f = Tensor::vector(kAtomFeatureLength);
  f[static_cast<std::size_t>(atom.element)] = 1.0;
  f[kElementCount] = atom.aromatic ? 1.0 : 0.0;
  int charge = std::clamp(atom.formal_charge, -2, 2);
  f[kElementCount + 1 + static_cast<std::size_t>(charge + 2)] = 1.0;
  int degree = std::min(atom.degree, 5);
  f[kElementCount + 6 + static_cast<std::size_t>(degree)] = 1.0;
  return f;
}

Tensor bond_feature(int code) {
  if (code < kBondSingle || code > kBondAromatic) {
    throw Error(ErrorKind::InvalidBondCode, "bond code " + std::to_string(code));
  }
  Tensor f = Tensor::vector(kBondFeatureLength);
  f[static_cast<std::size_t>(code - 1)] = 1.0;
  return f;
}

std::uint64_t feature_schema_hash() {
  return fnv1a64(
      "atom:elem12[B,C,N,O,P,S,F,Cl,Br,I,H,*]+arom1+charge5[-2..2]+deg6[0..5];bond:onehot4");
}

}  // namespace drugclip
