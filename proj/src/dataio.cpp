#include "drugclip/dataio.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include "drugclip/csv.hpp"

namespace drugclip {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

int days_in_month(int year, int month) {
  static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2) {
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return leap ? 29 : 28;
  }
  return days[month - 1];
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t at = s.find(sep, start);
    if (at == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

[[noreturn]] void row_error(ErrorKind kind, const std::string& path, std::size_t line,
                            const std::string& detail) {
  throw Error(kind, path + " line " + std::to_string(line) + ": " + detail);
}

}  // namespace

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date parse_date(const std::string& text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorKind::UnparseableDate, "'" + text + "' is not YYYY-MM-DD");
  }
  std::string y = text.substr(0, 4), m = text.substr(5, 2), d = text.substr(8, 2);
  if (!all_digits(y) || !all_digits(m) || !all_digits(d)) {
    throw Error(ErrorKind::UnparseableDate, "'" + text + "' is not YYYY-MM-DD");
  }
  Date date{std::stoi(y), std::stoi(m), std::stoi(d)};
  if (date.month < 1 || date.month > 12 || date.day < 1 ||
      date.day > days_in_month(date.year, date.month)) {
    throw Error(ErrorKind::UnparseableDate, "'" + text + "' is out of range");
  }
  return date;
}

std::vector<TrialRecord> load_trials(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, path);
  std::vector<Row> rows = read_tsv(in);
  const std::vector<std::string> header = {"trial_id", "date", "drug_id", "smiles", "icd_codes"};
  if (rows.empty() || rows[0].fields != header) {
    throw Error(ErrorKind::MalformedRow,
                path + ": expected header 'trial_id\\tdate\\tdrug_id\\tsmiles\\ticd_codes'");
  }
  std::vector<TrialRecord> trials;
  std::set<std::string> seen_ids;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Row& row = rows[i];
    if (row.fields.size() != 5) {
      row_error(ErrorKind::MalformedRow, path, row.line_no,
                "expected 5 columns, got " + std::to_string(row.fields.size()));
    }
    TrialRecord trial;
    trial.trial_id = row.fields[0];
    if (trial.trial_id.empty()) row_error(ErrorKind::MalformedRow, path, row.line_no, "empty trial_id");
    if (!seen_ids.insert(trial.trial_id).second) {
      row_error(ErrorKind::DuplicateTrialId, path, row.line_no, trial.trial_id);
    }
    try {
      trial.date = parse_date(row.fields[1]);
    } catch (const Error& e) {
      row_error(ErrorKind::UnparseableDate, path, row.line_no, e.what());
    }
    trial.drug_id = row.fields[2];
    trial.smiles = row.fields[3];
    if (row.fields[4].empty()) {
      row_error(ErrorKind::MalformedRow, path, row.line_no, "icd_codes must be non-empty");
    }
    for (const std::string& code_text : split(row.fields[4], ';')) {
      if (code_text.empty()) continue;
      try {
        trial.codes.push_back(normalize_code(code_text));
      } catch (const Error& e) {
        row_error(ErrorKind::InvalidCodeFormat, path, row.line_no, e.what());
      }
    }
    if (trial.codes.empty()) {
      row_error(ErrorKind::MalformedRow, path, row.line_no, "icd_codes must be non-empty");
    }
    trials.push_back(std::move(trial));
  }
  return trials;
}

std::vector<DrugRecord> load_drug_db(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, path);
  std::vector<Row> rows = read_tsv(in);
  const std::vector<std::string> header = {"drug_id", "smiles", "first_tested_date"};
  if (rows.empty() || rows[0].fields != header) {
    throw Error(ErrorKind::MalformedRow,
                path + ": expected header 'drug_id\\tsmiles\\tfirst_tested_date'");
  }
  std::vector<DrugRecord> drugs;
  std::set<std::string> seen_ids;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Row& row = rows[i];
    if (row.fields.size() != 3) {
      row_error(ErrorKind::MalformedRow, path, row.line_no,
                "expected 3 columns, got " + std::to_string(row.fields.size()));
    }
    DrugRecord drug;
    drug.drug_id = row.fields[0];
    if (drug.drug_id.empty()) row_error(ErrorKind::MalformedRow, path, row.line_no, "empty drug_id");
    if (!seen_ids.insert(drug.drug_id).second) {
      row_error(ErrorKind::DuplicateDrugId, path, row.line_no, drug.drug_id);
    }
    drug.smiles = row.fields[1];
    try {
      drug.first_tested_date = parse_date(row.fields[2]);
    } catch (const Error& e) {
      row_error(ErrorKind::UnparseableDate, path, row.line_no, e.what());
    }
    drugs.push_back(std::move(drug));
  }
  return drugs;
}

Dataset build_dataset(std::vector<TrialRecord> trials, Ontology ontology) {
  Dataset dataset;
  dataset.ontology = std::move(ontology);
  for (TrialRecord& trial : trials) {
    auto have = dataset.graphs.find(trial.drug_id);
    if (have == dataset.graphs.end()) {
      try {
        dataset.graphs.emplace(trial.drug_id, parse_smiles(trial.smiles));
      } catch (const Error& e) {
        std::cerr << "warning: dropping trial " << trial.trial_id << " (drug " << trial.drug_id
                  << "): " << e.what() << "\n";
        continue;
      }
    }
    for (const DiseaseCode& code : trial.codes) {
      if (!dataset.ontology.contains(code.canonical)) {
        std::cerr << "warning: code " << code.display
                  << " missing from the code table; inserting with empty description\n";
        dataset.ontology.insert(code);
      }
    }
    dataset.trials.push_back(std::move(trial));
  }
  return dataset;
}

namespace {

[[noreturn]] void corrupt(const std::string& path, const std::string& detail) {
  throw Error(ErrorKind::CorruptCheckpoint, path + ": " + detail);
}

}  // namespace

void save_checkpoint(const ParameterStore& params, const CheckpointConfig& config,
                     const Ontology& ontology, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path);
  out << "drugclip-checkpoint " << kCheckpointVersion << "\n";
  out << "config dim " << config.dim << " depth " << config.depth << " readout "
      << to_string(config.readout) << " seed " << config.seed << "\n";
  out << "schema " << feature_schema_hash() << "\n";
  std::vector<std::string> codes = ontology.id_order();
  out << "ontology " << codes.size() << "\n";
  for (const std::string& canonical : codes) out << canonical << "\n";
  out << "params " << params.size() << "\n";
  char buf[64];
  for (const auto& [name, entry] : params) {
    const Tensor& value = entry.value;
    char kind = entry.kind == ParamKind::Weight ? 'w' : entry.kind == ParamKind::Bias ? 'b' : 'e';
    out << name << " " << kind << " " << value.rank() << " " << value.rows() << " " << value.cols()
        << "\n";
    for (std::size_t i = 0; i < value.size(); ++i) {
      // %.17g round-trips doubles exactly
      std::snprintf(buf, sizeof buf, "%.17g", value[i]);
      out << buf << (i + 1 == value.size() ? "" : " ");
    }
    out << "\n";
  }
  out << "end\n";
  if (!out) throw Error(ErrorKind::FileNotFound, "write failed for " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileNotFound, path);

  Checkpoint ckpt;
  std::string magic;
  in >> magic;
  if (magic != "drugclip-checkpoint") corrupt(path, "bad magic");
  in >> ckpt.format_version;
  if (!in) corrupt(path, "missing version");
  if (ckpt.format_version != kCheckpointVersion) {
    throw Error(ErrorKind::UnsupportedVersion,
                path + ": version " + std::to_string(ckpt.format_version) + ", supported " +
                    std::to_string(kCheckpointVersion));
  }

  std::string key, readout;
  in >> key;
  if (key != "config") corrupt(path, "missing config");
  in >> key >> ckpt.config.dim >> key >> ckpt.config.depth >> key >> readout >> key >>
      ckpt.config.seed;
  if (!in) corrupt(path, "bad config line");
  ckpt.config.readout = readout_from_string(readout);

  in >> key;
  if (key != "schema") corrupt(path, "missing schema hash");
  in >> ckpt.schema_hash;
  if (!in) corrupt(path, "bad schema hash");
  if (ckpt.schema_hash != feature_schema_hash()) {
    corrupt(path, "feature schema hash mismatch");
  }

  std::size_t n_codes = 0;
  in >> key >> n_codes;
  if (!in || key != "ontology") corrupt(path, "missing ontology section");
  ckpt.ontology_codes.reserve(n_codes);
  for (std::size_t i = 0; i < n_codes; ++i) {
    std::string canonical;
    in >> canonical;
    if (!in) corrupt(path, "truncated ontology section");
    ckpt.ontology_codes.push_back(canonical);
  }

  std::size_t n_params = 0;
  in >> key >> n_params;
  if (!in || key != "params") corrupt(path, "missing params section");
  for (std::size_t i = 0; i < n_params; ++i) {
    std::string name;
    char kind_char;
    int rank;
    std::size_t rows, cols;
    in >> name >> kind_char >> rank >> rows >> cols;
    if (!in) corrupt(path, "truncated parameter header");
    ParamKind kind = kind_char == 'w'   ? ParamKind::Weight
                     : kind_char == 'b' ? ParamKind::Bias
                     : kind_char == 'e' ? ParamKind::Embedding
                                        : throw Error(ErrorKind::CorruptCheckpoint,
                                                      path + ": bad parameter kind");
    if (rank != 1 && rank != 2) corrupt(path, "bad parameter rank");
    Tensor value = rank == 1 ? Tensor::vector(rows) : Tensor::matrix(rows, cols);
    for (std::size_t j = 0; j < value.size(); ++j) {
      in >> value[j];
      if (!in) corrupt(path, "truncated values for parameter " + name);
    }
    ckpt.params.register_param(name, std::move(value), kind);
  }

  in >> key;
  if (!in || key != "end") corrupt(path, "missing end marker");
  ckpt.params.set_seed(ckpt.config.seed);
  return ckpt;
}

}  // namespace drugclip
