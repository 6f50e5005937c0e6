#include "drugclip/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "drugclip/csv.hpp"

namespace drugclip {

namespace {

bool valid_canonical(const std::string& c) {
  if (c.size() < 3 || c.size() > 7) return false;
  if (!std::isupper(static_cast<unsigned char>(c[0]))) return false;
  if (!std::isdigit(static_cast<unsigned char>(c[1]))) return false;
  if (!std::isalnum(static_cast<unsigned char>(c[2]))) return false;
  for (std::size_t i = 3; i < c.size(); ++i) {
    if (!std::isalnum(static_cast<unsigned char>(c[i]))) return false;
  }
  return true;
}

std::string display_of(const std::string& canonical) {
  if (canonical.size() <= 3) return canonical;
  return canonical.substr(0, 3) + "." + canonical.substr(3);
}

}  // namespace

DiseaseCode normalize_code(const std::string& text) {
  std::string canonical;
  canonical.reserve(text.size());
  for (char c : text) {
    if (c == '.') continue;
    canonical += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  if (!valid_canonical(canonical)) {
    throw Error(ErrorKind::InvalidCodeFormat, "'" + text + "'");
  }
  DiseaseCode code;
  code.canonical = canonical;
  code.display = display_of(canonical);
  return code;
}

std::vector<DiseaseCode> ancestors(const DiseaseCode& code) {
  std::vector<DiseaseCode> out;
  std::size_t len = code.canonical.size();
  if (len <= 3) return out;
  auto prefix_code = [&](std::size_t n) {
    DiseaseCode ancestor;
    ancestor.canonical = code.canonical.substr(0, n);
    ancestor.display = display_of(ancestor.canonical);
    return ancestor;
  };
  out.push_back(prefix_code(3));
  if (len - 1 > 3) out.push_back(prefix_code(len - 1));
  return out;
}

void Ontology::insert(const DiseaseCode& code) {
  auto [it, inserted] = codes_.try_emplace(code.canonical, code);
  if (!inserted && it->second.description.empty()) {
    it->second.description = code.description;
  }
  bool changed = inserted;
  for (const DiseaseCode& ancestor : ancestors(code)) {
    changed |= codes_.try_emplace(ancestor.canonical, ancestor).second;
  }
  if (changed) rebuild_index();
}

Ontology Ontology::from_id_order(const std::vector<std::string>& canonicals) {
  Ontology onto;
  onto.frozen_ids_ = true;
  for (const std::string& canonical : canonicals) {
    DiseaseCode code;
    code.canonical = canonical;
    code.display = display_of(canonical);
    if (onto.codes_.try_emplace(canonical, code).second) {
      onto.index_[canonical] = onto.by_id_.size();
      onto.by_id_.push_back(canonical);
    }
  }
  return onto;
}

void Ontology::rebuild_index() {
  // frozen ontologies keep their explicit order
  if (frozen_ids_) return;
  index_.clear();
  by_id_.clear();
  for (const auto& [canonical, code] : codes_) {
    index_[canonical] = by_id_.size();
    by_id_.push_back(canonical);
  }
}

bool Ontology::contains(const std::string& canonical) const {
  return codes_.count(canonical) > 0;
}

std::size_t Ontology::id_of(const std::string& canonical) const {
  auto it = index_.find(canonical);
  if (it == index_.end()) throw Error(ErrorKind::UnknownCode, canonical);
  return it->second;
}

const DiseaseCode& Ontology::code_at(std::size_t id) const {
  if (id >= by_id_.size()) throw Error(ErrorKind::UnknownCode, "id " + std::to_string(id));
  return codes_.at(by_id_[id]);
}

const DiseaseCode& Ontology::get(const std::string& canonical) const {
  auto it = codes_.find(canonical);
  if (it == codes_.end()) throw Error(ErrorKind::UnknownCode, canonical);
  return it->second;
}

std::vector<std::string> Ontology::id_order() const {
  return by_id_;
}

Ontology load_code_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, path);
  std::vector<Row> rows = read_csv(in);
  if (rows.empty() || rows[0].fields != std::vector<std::string>{"code", "description"}) {
    throw Error(ErrorKind::MalformedRow, path + ": expected header 'code,description'");
  }
  Ontology onto;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Row& row = rows[i];
    if (row.fields.size() != 2) {
      throw Error(ErrorKind::MalformedRow,
                  path + " line " + std::to_string(row.line_no) + ": expected 2 columns, got " +
                      std::to_string(row.fields.size()));
    }
    DiseaseCode code;
    try {
      code = normalize_code(row.fields[0]);
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidCodeFormat,
                  path + " line " + std::to_string(row.line_no) + ": " + row.fields[0]);
    }
    code.description = row.fields[1];
    onto.insert(code);
  }
  return onto;
}

}  // namespace drugclip
