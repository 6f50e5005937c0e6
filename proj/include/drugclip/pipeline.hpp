#pragma once

#include <string>
#include <vector>

#include "drugclip/contrastive.hpp"
#include "drugclip/dataio.hpp"
#include "drugclip/ranking.hpp"

namespace drugclip {

// File-level entry points shared by the CLI and the Python module.

// Loads the code table, trials, and drug table; empty trial SMILES fall back
// to the drug table entry for that drug.
Dataset load_training_dataset(const std::string& trials_path, const std::string& drugs_path,
                              const std::string& icd_path);

// Trains and writes the checkpoint to out_path. Returns the loss history.
TrainResult train_files(const std::string& trials_path, const std::string& drugs_path,
                        const std::string& icd_path, const TrainConfig& config,
                        const std::string& out_path);

struct EvalFilesResult {
  EvalReport report;
  std::size_t db_size = 0;
  std::size_t test_count = 0;
};

EvalFilesResult evaluate_files(const std::string& model_path, const std::string& trials_path,
                               const std::string& drugs_path, const std::string& icd_path,
                               const std::string& cutoff, const std::string& cutoff_end,
                               const std::vector<double>& ks);

// ';'-separated query codes against the full drug table.
std::vector<std::pair<std::string, double>> rank_files(const std::string& model_path,
                                                       const std::string& codes_text,
                                                       const std::string& drugs_path,
                                                       std::size_t top);

std::vector<DiseaseCode> parse_code_list(const std::string& joined);

}  // namespace drugclip
