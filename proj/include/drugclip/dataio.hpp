#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drugclip/encoders.hpp"
#include "drugclip/molgraph.hpp"
#include "drugclip/ontology.hpp"
#include "drugclip/params.hpp"

namespace drugclip {

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const Date&) const = default;
  std::string to_string() const;
};

// Strict ISO-8601 YYYY-MM-DD.
Date parse_date(const std::string& text);

struct TrialRecord {
  std::string trial_id;
  Date date;
  std::string drug_id;
  std::string smiles;
  std::vector<DiseaseCode> codes;  // non-empty
};

struct DrugRecord {
  std::string drug_id;
  std::string smiles;
  Date first_tested_date;
};

// TSV with header `trial_id\tdate\tdrug_id\tsmiles\ticd_codes`; icd_codes is
// a non-empty ';'-separated list.
std::vector<TrialRecord> load_trials(const std::string& path);

// TSV with header `drug_id\tsmiles\tfirst_tested_date`.
std::vector<DrugRecord> load_drug_db(const std::string& path);

// Trials ready for training: SMILES parsed once per drug, disease codes all
// present in the ontology. Trials whose SMILES fail to parse are dropped with
// a warning; codes missing from the ontology are inserted with a warning.
struct Dataset {
  std::vector<TrialRecord> trials;
  std::map<std::string, MolGraph> graphs;  // keyed by drug_id
  Ontology ontology;
};

Dataset build_dataset(std::vector<TrialRecord> trials, Ontology ontology);

struct CheckpointConfig {
  int dim = 64;
  int depth = 3;
  Readout readout = Readout::Sum;
  std::uint64_t seed = 42;
};

struct Checkpoint {
  int format_version = 0;
  CheckpointConfig config;
  ParameterStore params;
  std::vector<std::string> ontology_codes;  // canonical forms in id order
  std::uint64_t schema_hash = 0;

  Ontology make_ontology() const { return Ontology::from_id_order(ontology_codes); }
};

constexpr int kCheckpointVersion = 1;

// Versioned text format with full decimal precision; save then load restores
// every parameter bitwise.
void save_checkpoint(const ParameterStore& params, const CheckpointConfig& config,
                     const Ontology& ontology, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace drugclip
