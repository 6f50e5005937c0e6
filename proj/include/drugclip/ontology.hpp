#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "drugclip/error.hpp"

namespace drugclip {

// One ICD-10-CM code. canonical is the uppercase dotless form ("G44311");
// display re-inserts the dot after the category ("G44.311").
struct DiseaseCode {
  std::string canonical;
  std::string display;
  std::string description;

  bool operator==(const DiseaseCode& other) const { return canonical == other.canonical; }
  bool operator<(const DiseaseCode& other) const { return canonical < other.canonical; }
};

// Strips the dot, uppercases, and validates: letter, digit, digit or letter,
// then up to four more alphanumerics (total length 3-7).
DiseaseCode normalize_code(const std::string& text);

// The broader codes this one refines: its three-character category and its
// immediate parent (one character shorter), shortest first and deduplicated.
// A three-character category code has none.
std::vector<DiseaseCode> ancestors(const DiseaseCode& code);

// Code set closed under ancestors, with dense ids in sorted canonical order.
class Ontology {
 public:
  // Inserts the code and any missing ancestors. Re-inserting an existing
  // code keeps the stored entry but fills in an empty description.
  void insert(const DiseaseCode& code);

  // Rebuilds an ontology whose ids follow the given canonical order exactly
  // (used when restoring from a checkpoint; embeddings are keyed by id).
  static Ontology from_id_order(const std::vector<std::string>& canonicals);

  bool contains(const std::string& canonical) const;
  std::size_t id_of(const std::string& canonical) const;  // UnknownCode if absent
  const DiseaseCode& code_at(std::size_t id) const;
  const DiseaseCode& get(const std::string& canonical) const;

  std::size_t size() const { return codes_.size(); }

  // canonical forms in id order
  std::vector<std::string> id_order() const;

 private:
  std::map<std::string, DiseaseCode> codes_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::string> by_id_;
  bool frozen_ids_ = false;

  // ids follow sorted canonical order; rebuilt on every insert so reads
  // never mutate state and stay safe under concurrency
  void rebuild_index();
};

// CSV with header `code,description`, RFC-4180 quoting. Rows are normalized,
// inserted, and closed under ancestors.
Ontology load_code_table(const std::string& path);

}  // namespace drugclip
